"""Sparse multivariate polynomials over the rationals."""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from operator import add
from typing import Dict, Mapping, Optional, Sequence, Tuple

from gmpy2 import mpq

from .orders import GREVLEX, Monomial, MonomialOrder, as_order


class ArityError(ValueError):
    pass


def to_mpq(c) -> mpq:
    if isinstance(c, int) or type(c).__name__ == "mpq":
        return mpq(c)
    if isinstance(c, Rational):
        return mpq(int(c.numerator), int(c.denominator))
    if isinstance(c, str):
        return mpq(Fraction(c))
    raise TypeError(f"coefficient {c!r} is not an exact rational")


class MPoly:
    """Polynomial in ``nvars`` variables stored as ``{exponent tuple: mpq}``.

    Instances are treated as immutable; arithmetic returns new objects.
    Variable names are cosmetic and only used for printing and serialisation.
    """

    __slots__ = ("nvars", "terms", "names")

    def __init__(self, nvars: int, terms: Optional[Mapping[Monomial, object]] = None,
                 names: Optional[Sequence[str]] = None):
        self.nvars = nvars
        clean: Dict[Monomial, mpq] = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != nvars:
                raise ArityError(f"monomial {m} has arity {len(m)}, expected {nvars}")
            c = to_mpq(c)
            if c:
                clean[m] = clean.get(m, 0) + c
                if not clean[m]:
                    del clean[m]
        self.terms = clean
        self.names = tuple(names) if names is not None else None

    @classmethod
    def _raw(cls, nvars, terms, names=None) -> "MPoly":
        p = cls.__new__(cls)
        p.nvars, p.terms, p.names = nvars, terms, names
        return p

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, nvars, names=None):
        return cls._raw(nvars, {}, names)

    @classmethod
    def constant(cls, nvars, c, names=None):
        return cls(nvars, {(0,) * nvars: c}, names)

    @classmethod
    def variable(cls, nvars, i, names=None):
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): mpq(1)}, names)

    @classmethod
    def gens(cls, names: Sequence[str]):
        names = tuple(names)
        return [cls.variable(len(names), i, names) for i in range(len(names))]

    # -- basic properties -------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_zero(self):
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def degree(self, i: int) -> int:
        return max((m[i] for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def variables(self) -> set:
        """Indices of variables that actually occur."""
        return {i for m in self.terms for i, e in enumerate(m) if e}

    def leading_monomial(self, order: MonomialOrder = GREVLEX) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return as_order(order).max(self.terms)

    def leading_coefficient(self, order: MonomialOrder = GREVLEX) -> mpq:
        return self.terms[self.leading_monomial(order)]

    def sorted_terms(self, order: MonomialOrder = GREVLEX):
        order = as_order(order)
        return sorted(self.terms.items(), key=lambda mc: order.rank(mc[0]))

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "MPoly"):
        if self.nvars != other.nvars:
            raise ArityError(f"arity mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            self._check(other)
            return other
        return MPoly.constant(self.nvars, other, self.names)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return MPoly._raw(self.nvars, out, self.names or other.names)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw(self.nvars, {m: -c for m, c in self.terms.items()}, self.names)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = to_mpq(other)
            if not c:
                return MPoly.zero(self.nvars, self.names)
            return MPoly._raw(self.nvars, {m: c * v for m, v in self.terms.items()}, self.names)
        self._check(other)
        out: Dict[Monomial, mpq] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(map(add, m1, m2))
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    del out[m]
        return MPoly._raw(self.nvars, out, self.names or other.names)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = MPoly.constant(self.nvars, 1, self.names)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def mul_term(self, mono: Monomial, coeff) -> "MPoly":
        coeff = to_mpq(coeff)
        return MPoly._raw(self.nvars, {tuple(map(add, m, mono)): c * coeff
                                       for m, c in self.terms.items()} if coeff else {},
                          self.names)

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if self.terms == {} and other == 0:
            return True
        try:
            return self == MPoly.constant(self.nvars, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- normalisation ----------------------------------------------------
    def monic(self, order: MonomialOrder = GREVLEX) -> "MPoly":
        if not self.terms:
            return self
        return self * (1 / self.leading_coefficient(order))

    def primitive(self, order: MonomialOrder = GREVLEX) -> "MPoly":
        """Scale to coprime integer coefficients with positive leading coefficient."""
        if not self.terms:
            return self
        den = 1
        for c in self.terms.values():
            den = math.lcm(den, int(c.denominator))
        nums = [int(c * den) for c in self.terms.values()]
        g = math.gcd(*nums)
        scale = mpq(den, g)
        if self.leading_coefficient(order) < 0:
            scale = -scale
        return self * scale

    def with_names(self, names: Sequence[str]) -> "MPoly":
        if len(names) != self.nvars:
            raise ArityError("name count does not match arity")
        return MPoly._raw(self.nvars, self.terms, tuple(names))

    # -- calculus / substitution -----------------------------------------
    def diff(self, i: int) -> "MPoly":
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                e = list(m)
                e[i] -= 1
                out[tuple(e)] = c * m[i]
        return MPoly._raw(self.nvars, out, self.names)

    def gradient(self):
        return [self.diff(i) for i in range(self.nvars)]

    def drop_variables(self, k: int, names: Optional[Sequence[str]] = None) -> "MPoly":
        """Reinterpret a polynomial free of the first ``k`` variables in the remaining ones."""
        if any(any(m[:k]) for m in self.terms):
            raise ValueError("polynomial still depends on a dropped variable")
        nm = names if names is not None else (self.names[k:] if self.names else None)
        return MPoly._raw(self.nvars - k, {m[k:]: c for m, c in self.terms.items()}, nm)

    def embed(self, nvars: int, positions: Sequence[int], names=None) -> "MPoly":
        """Map variable ``i`` to variable ``positions[i]`` of a larger ring."""
        out = {}
        for m, c in self.terms.items():
            e = [0] * nvars
            for i, x in enumerate(m):
                e[positions[i]] += x
            out[tuple(e)] = c
        return MPoly._raw(nvars, out, names)

    # -- evaluation -------------------------------------------------------
    def __call__(self, *point):
        return evaluate(self, point)

    def term_values(self, point: Sequence[float]):
        if len(point) != self.nvars:
            raise ArityError(f"point has {len(point)} coordinates, expected {self.nvars}")
        vals = []
        for m, c in self.terms.items():
            v = float(c)
            for x, e in zip(point, m):
                if e:
                    v *= x ** e
            vals.append(v)
        return vals

    # -- printing ---------------------------------------------------------
    def to_str(self, names: Optional[Sequence[str]] = None, order: MonomialOrder = GREVLEX) -> str:
        names = names or self.names or [f"x{i}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms(order):
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append((sign, body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"MPoly({self.nvars}, {self.to_str()!r})"


def evaluate(p: MPoly, point: Sequence):
    """Exact value at a rational point; ``math.fsum`` of the terms at a float point."""
    if len(point) != p.nvars:
        raise ArityError(f"point has {len(point)} coordinates, expected {p.nvars}")
    if all(isinstance(x, (int, Rational)) or type(x).__name__ == "mpq" for x in point):
        pt = [mpq(x) for x in point]
        total = mpq(0)
        for m, c in p.terms.items():
            v = c
            for x, e in zip(pt, m):
                if e:
                    v *= x ** e
            total += v
        return total
    return math.fsum(sorted(p.term_values([float(x) for x in point]), key=abs))


def residual(p: MPoly, point: Sequence[float]) -> Tuple[float, float]:
    """``(value, sum |term|)`` at a float point; the ratio is the relative residual."""
    vals = p.term_values([float(x) for x in point])
    return math.fsum(sorted(vals, key=abs)), math.fsum(abs(v) for v in vals)


def relative_residual(p: MPoly, point: Sequence[float]) -> float:
    value, scale = residual(p, point)
    return abs(value) / scale if scale else abs(value)

