"""Exact real numbers of the form sum_m c_m * sqrt(m), c_m rational, m squarefree.

This is the coefficient ring of bosonic ladder amplitudes sqrt((n_i+1) n_j).
Radicals are kept symbolically and only the float view rounds.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Dict, Iterator, Tuple

from gmpy2 import mpq

from .polyring.mpoly import to_mpq


@lru_cache(maxsize=None)
def prime_factors(m: int) -> Tuple[int, ...]:
    out, p = [], 2
    while p * p <= m:
        while m % p == 0:
            out.append(p)
            m //= p
        p += 1
    if m > 1:
        out.append(m)
    return tuple(out)


@lru_cache(maxsize=None)
def split_square(k: int) -> Tuple[int, int]:
    """``k = a**2 * b`` with ``b`` squarefree; returns ``(a, b)``."""
    if k < 0:
        raise ValueError("negative radicand")
    if k == 0:
        return 0, 1
    a, b = 1, 1
    counts: Dict[int, int] = {}
    for p in prime_factors(k):
        counts[p] = counts.get(p, 0) + 1
    for p, e in counts.items():
        a *= p ** (e // 2)
        if e % 2:
            b *= p
    return a, b


class Surd:
    __slots__ = ("parts",)

    def __init__(self, parts=None):
        clean = {}
        for m, c in (parts or {}).items():
            c = to_mpq(c)
            if c:
                clean[m] = c
        self.parts: Dict[int, mpq] = clean

    @classmethod
    def rational(cls, c) -> "Surd":
        return cls({1: c})

    @classmethod
    def sqrt(cls, k: int, coeff=1) -> "Surd":
        a, b = split_square(k)
        return cls({b: to_mpq(coeff) * a})

    @staticmethod
    def coerce(x) -> "Surd":
        return x if isinstance(x, Surd) else Surd.rational(x)

    def __bool__(self):
        return bool(self.parts)

    def __iter__(self) -> Iterator[Tuple[int, mpq]]:
        return iter(sorted(self.parts.items()))

    def is_rational(self) -> bool:
        return all(m == 1 for m in self.parts)

    def radicands(self) -> set:
        return {m for m in self.parts if m != 1}

    def __add__(self, other):
        other = Surd.coerce(other)
        out = dict(self.parts)
        for m, c in other.parts.items():
            out[m] = out.get(m, 0) + c
        return Surd(out)

    __radd__ = __add__

    def __neg__(self):
        return Surd({m: -c for m, c in self.parts.items()})

    def __sub__(self, other):
        return self + (-Surd.coerce(other))

    def __rsub__(self, other):
        return Surd.coerce(other) - self

    def __mul__(self, other):
        other = Surd.coerce(other)
        out: Dict[int, mpq] = {}
        for m1, c1 in self.parts.items():
            for m2, c2 in other.parts.items():
                g = math.gcd(m1, m2)
                m = (m1 // g) * (m2 // g)
                out[m] = out.get(m, 0) + c1 * c2 * g
        return Surd(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            return self.parts == Surd.coerce(other).parts
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.parts.items()))

    def __float__(self):
        return math.fsum(float(c) * math.sqrt(m) for m, c in self.parts.items())

    def __repr__(self):
        if not self.parts:
            return "0"
        return " + ".join(str(c) if m == 1 else f"{c}*sqrt({m})" for m, c in self)


ZERO = Surd()
ONE = Surd.rational(1)
