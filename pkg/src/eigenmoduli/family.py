"""Hamiltonian families H(lambda) = sum_i lambda_i H_i."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .fock import (BOSE, FERMI, FockBasis, Operator, enumerate_basis, hopping_operator, identity,
                   interaction_operator, number_operator)
from .surd import ZERO, Surd


class FamilyError(ValueError):
    pass


def _q(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError(f"model parameters must be exact rationals, got float {x!r}")
    return Fraction(x)


def _matrix(x, q: int, name: str) -> Tuple[Tuple[Fraction, ...], ...]:
    m = tuple(tuple(_q(v) for v in row) for row in x)
    if len(m) != q or any(len(r) != q for r in m):
        raise FamilyError(f"{name} must be a {q}x{q} matrix")
    return m


def chain_matrix(q: int, value, periodic: bool = False) -> Tuple[Tuple[Fraction, ...], ...]:
    """Nearest-neighbour q x q matrix with ``value`` on the bonds."""
    v = _q(value)
    m = [[Fraction(0)] * q for _ in range(q)]
    bonds = [(i, i + 1) for i in range(q - 1)]
    if periodic and q > 2:
        bonds.append((q - 1, 0))
    for i, j in bonds:
        m[i][j] = m[j][i] = v
    return tuple(tuple(r) for r in m)


@dataclass(frozen=True)
class ModelSpec:
    """Lattice model with exact rational parameters.

    ``hopping[i][j]`` is t_ij, ``intersite[i][j]`` is U'_ij (only i < j is
    used), ``onsite`` is the Hubbard U.
    """

    q: int
    n: int
    statistics: str = BOSE
    hopping: Tuple[Tuple[Fraction, ...], ...] = ()
    onsite: Fraction = Fraction(0)
    intersite: Tuple[Tuple[Fraction, ...], ...] = ()
    potentials: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        q = self.q
        if self.statistics not in (BOSE, FERMI):
            raise FamilyError(f"statistics must be 'bose' or 'fermi', got {self.statistics!r}")
        if q < 1 or self.n < 1:
            raise FamilyError("q and n must be positive")
        zero = tuple(tuple(Fraction(0) for _ in range(q)) for _ in range(q))
        t = _matrix(self.hopping, q, "hopping") if self.hopping else zero
        u2 = _matrix(self.intersite, q, "intersite") if self.intersite else zero
        for i in range(q):
            if t[i][i]:
                raise FamilyError("hopping matrix must have zero diagonal")
            for j in range(q):
                if t[i][j] != t[j][i]:
                    raise FamilyError("hopping matrix must be symmetric")
                if u2[i][j] != u2[j][i]:
                    raise FamilyError("intersite interaction must be symmetric")
        pots = tuple(_q(v) for v in self.potentials) if self.potentials else (Fraction(0),) * q
        if len(pots) != q:
            raise FamilyError(f"need {q} potentials")
        object.__setattr__(self, "hopping", t)
        object.__setattr__(self, "intersite", u2)
        object.__setattr__(self, "onsite", _q(self.onsite))
        object.__setattr__(self, "potentials", pots)
        if self.statistics == FERMI and self.onsite:
            warnings.warn("onsite U has no effect for spinless fermions", stacklevel=3)

    @classmethod
    def dimer(cls, n: int = 2, t=1, U=1, Uprime=0, statistics: str = BOSE) -> "ModelSpec":
        """Two-site model with hopping t, onsite U and intersite U'."""
        return cls(2, n, statistics, chain_matrix(2, t), U, chain_matrix(2, Uprime))

    @classmethod
    def chain(cls, q: int, n: int, t=1, U=0, Uprime=0, statistics: str = BOSE,
              periodic: bool = False) -> "ModelSpec":
        return cls(q, n, statistics, chain_matrix(q, t, periodic), U,
                   chain_matrix(q, Uprime, periodic))

    def to_dict(self) -> dict:
        s = lambda x: str(x)  # noqa: E731
        return {
            "q": self.q, "n": self.n, "statistics": self.statistics,
            "hopping": [[s(v) for v in r] for r in self.hopping],
            "onsite": s(self.onsite),
            "intersite": [[s(v) for v in r] for r in self.intersite],
            "potentials": [s(v) for v in self.potentials],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        d = dict(d)
        d.pop("kind", None)
        unknown = set(d) - {"q", "n", "statistics", "hopping", "onsite", "intersite", "potentials"}
        if unknown:
            raise FamilyError(f"unknown model keys: {sorted(unknown)}")
        q = int(d["q"])
        for key in ("hopping", "intersite"):
            v = d.get(key)
            if v is not None and not isinstance(v, (list, tuple)):
                d[key] = chain_matrix(q, v)
        return cls(q=q, n=int(d["n"]), statistics=d.get("statistics", BOSE),
                   hopping=d.get("hopping", ()), onsite=d.get("onsite", 0),
                   intersite=d.get("intersite", ()), potentials=d.get("potentials", ()))


@dataclass(frozen=True)
class HamiltonianFamily:
    operators: Tuple[Operator, ...]
    labels: Tuple[str, ...]
    kind: str = "custom"
    conserved_total: Optional[int] = None
    basis: Optional[FockBasis] = field(default=None, compare=False)
    spec: Optional[ModelSpec] = field(default=None, compare=False)

    def __post_init__(self):
        ops = tuple(self.operators)
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "labels", tuple(self.labels))
        if not ops:
            raise FamilyError("empty family")
        if len(self.labels) != len(ops):
            raise FamilyError("one label per operator required")
        N = ops[0].dim
        if any(op.dim != N for op in ops):
            raise FamilyError("operators have different dimensions")
        if len(ops) >= 2 * N:
            raise FamilyError(f"family dimension M={len(ops)} must be below 2N={2 * N}")
        if gram_rank(ops) != len(ops):
            raise FamilyError("family operators are linearly dependent")

    @property
    def N(self) -> int:
        return self.operators[0].dim

    @property
    def M(self) -> int:
        return len(self.operators)

    @property
    def is_exact(self) -> bool:
        return all(op.is_exact for op in self.operators)

    def descriptor(self) -> dict:
        d = {"kind": self.kind, "N": self.N, "M": self.M, "labels": list(self.labels)}
        if self.conserved_total is not None:
            d["conserved_total"] = self.conserved_total
        if self.spec is not None:
            d["model"] = self.spec.to_dict()
        return d

    def identity_coordinates(self) -> np.ndarray:
        """Coefficients c with sum_i c_i H_i = identity (used for energy absorption)."""
        if self.kind == "dft":
            c = np.zeros(self.M)
            c[1:] = 1.0 / self.conserved_total
            return c
        if "I" in self.labels:
            c = np.zeros(self.M)
            c[self.labels.index("I")] = 1.0
            return c
        A = np.stack([op.float_view.reshape(-1) for op in self.operators], axis=1)
        c, *_ = np.linalg.lstsq(A, np.eye(self.N).reshape(-1), rcond=None)
        if np.linalg.norm(A @ c - np.eye(self.N).reshape(-1)) > 1e-9:
            raise FamilyError("identity is not in the span of the family")
        return c.real


def gram_rank(ops: Sequence[Operator], rtol: float = 1e-10) -> int:
    """Rank of the Gram matrix Re tr(A^dag B) of the operators."""
    X = np.stack([op.float_view.reshape(-1) for op in ops])
    gram = (X.conj() @ X.T).real
    w = np.linalg.eigvalsh(gram)
    return int(np.sum(w > rtol * max(w.max(), 1.0)))


def kinetic_interaction(basis: FockBasis, spec: ModelSpec) -> Operator:
    """H0 = -sum_{i<j} t_ij (a_i^dag a_j + h.c.) + U/2 sum_i n_i(n_i-1) + sum_{i<j} U'_ij n_i n_j."""
    q = spec.q
    N = basis.dim
    total = Operator([[ZERO] * N for _ in range(N)], label="H0")
    for i in range(1, q + 1):
        if spec.onsite and basis.statistics == BOSE:
            total = total + interaction_operator(basis, i, i).scale(spec.onsite)
        for j in range(i + 1, q + 1):
            t = spec.hopping[i - 1][j - 1]
            if t:
                total = total + hopping_operator(basis, i, j).scale(-t)
            u = spec.intersite[i - 1][j - 1]
            if u:
                total = total + interaction_operator(basis, i, j).scale(u)
    total.label = "H0"
    return total


def build_dft_family(spec: ModelSpec) -> HamiltonianFamily:
    basis = enumerate_basis(spec.q, spec.n, spec.statistics)
    ops = [kinetic_interaction(basis, spec)]
    ops += [number_operator(basis, i) for i in range(1, spec.q + 1)]
    labels = ["F"] + [f"n{i}" for i in range(1, spec.q + 1)]
    return HamiltonianFamily(tuple(ops), tuple(labels), "dft", spec.n, basis, spec)


def build_oscillator_family(D: int) -> HamiltonianFamily:
    """(p^2, x^2, p, x, I) in a D-level truncation, hbar = 1.

    x^2 and p^2 are squares of the truncated x and p.  The momentum itself is
    imaginary and carried only as a float matrix.
    """
    if D < 4:
        raise FamilyError("oscillator truncation must be at least 4 levels")
    zero = [[ZERO] * D for _ in range(D)]
    x = [row[:] for row in zero]
    y = [row[:] for row in zero]  # y = (a^dag - a)/sqrt(2), p = i y
    for k in range(1, D):
        amp = Surd.sqrt(2 * k) * Fraction(1, 2)  # sqrt(k/2)
        x[k - 1][k] = x[k][k - 1] = amp
        y[k][k - 1] = amp
        y[k - 1][k] = -amp
    X = Operator(x, label="x")
    Y = Operator(y, label="y")
    P = Operator(matrix=1j * Y.float_view, label="p")
    X2 = X @ X
    P2 = (Y @ Y).scale(-1)
    X2.label, P2.label = "x2", "p2"
    ops = (P2, X2, P, X, identity(D))
    return HamiltonianFamily(ops, ("p2", "x2", "p", "x", "I"), "oscillator")


def assemble(family: HamiltonianFamily, lam: Sequence) -> Operator:
    """sum_i lam_i H_i; exact when every coefficient is rational and every operator exact."""
    lam = list(lam)
    if len(lam) != family.M:
        raise FamilyError(f"need {family.M} coefficients, got {len(lam)}")
    if family.is_exact and all(isinstance(c, (Rational, str)) or type(c).__name__ == "mpq"
                               for c in lam):
        N = family.N
        acc = [[ZERO] * N for _ in range(N)]
        for c, op in zip(lam, family.operators):
            c = Surd.rational(_q(c))
            if not c:
                continue
            for i in range(N):
                for j in range(N):
                    if op.exact[i][j]:
                        acc[i][j] = acc[i][j] + c * op.exact[i][j]
        return Operator(acc, label="H(lambda)")
    M = np.asarray(sum(complex(c) * op.float_view for c, op in zip(lam, family.operators)))
    if not np.any(M.imag):
        M = M.real
    return Operator(matrix=M, label="H(lambda)")
