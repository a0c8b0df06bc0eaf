"""Occupation-number bases and number-conserving second-quantized operators.

Sites are labelled 1..q as in the usual lattice notation.  Basis states are
occupation tuples in descending lexicographic order, so the q=2, n=2 boson
sector is ``(2,0), (1,1), (0,2)``.  Fermionic states follow the convention
``|n_1 ... n_q> = prod_{i ascending} (a_i^dag)^{n_i} |0>``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .surd import ONE, ZERO, Surd

BOSE = "bose"
FERMI = "fermi"

# dense matrices only; anything beyond this is not a desk-scale sector
MAX_DIMENSION = 20_000


class EmptySectorError(ValueError):
    pass


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class FockBasis:
    sites: int
    particles: int
    statistics: str
    states: Tuple[Tuple[int, ...], ...]
    index: Dict[Tuple[int, ...], int] = field(compare=False, repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def occupations(self) -> np.ndarray:
        return np.array(self.states, dtype=int).reshape(self.dim, self.sites)

    def _check_site(self, i: int):
        if not 1 <= i <= self.sites:
            raise IndexError(f"site {i} out of range 1..{self.sites}")


def sector_dimension(q: int, n: int, statistics: str) -> int:
    if statistics == BOSE:
        return math.comb(q + n - 1, n)
    if statistics == FERMI:
        return math.comb(q, n)
    raise ValueError(f"unknown statistics {statistics!r}")


def _compositions(n: int, q: int):
    """Occupation vectors of n bosons on q sites, descending lexicographic."""
    if q == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, q - 1):
            yield (first,) + rest


def enumerate_basis(q: int, n: int, statistics: str = BOSE) -> FockBasis:
    if q < 1 or n < 1:
        raise ValueError("need at least one site and one particle")
    dim = sector_dimension(q, n, statistics)
    if statistics == FERMI and n > q:
        raise EmptySectorError(f"{n} fermions do not fit on {q} sites")
    if dim > MAX_DIMENSION:
        raise CapacityError(f"sector dimension {dim} exceeds the dense limit {MAX_DIMENSION}")
    if statistics == BOSE:
        states = tuple(_compositions(n, q))
    else:
        states = tuple(sorted((s for s in itertools.product((1, 0), repeat=q) if sum(s) == n),
                              reverse=True))
    return FockBasis(q, n, statistics, states, {s: k for k, s in enumerate(states)})


class Operator:
    """Dense Hermitian matrix with optional exact entries in Q[sqrt(m)].

    ``exact`` is ``None`` for operators that are only known numerically
    (for example the imaginary momentum operator).
    """

    def __init__(self, exact: Optional[Sequence[Sequence[Surd]]] = None,
                 matrix: Optional[np.ndarray] = None, label: str = ""):
        if exact is None and matrix is None:
            raise ValueError("operator needs exact entries or a matrix")
        if exact is not None:
            exact = tuple(tuple(Surd.coerce(x) for x in row) for row in exact)
            n = len(exact)
            if any(len(row) != n for row in exact):
                raise ValueError("operator matrix must be square")
            if matrix is None:
                matrix = np.array([[float(x) for x in row] for row in exact], dtype=float)
                matrix = matrix.reshape(n, n)
        self.exact = exact
        self.matrix = np.asarray(matrix)
        self.matrix.setflags(write=False)
        self.label = label

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def float_view(self) -> np.ndarray:
        return self.matrix

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def entry(self, i: int, j: int) -> Surd:
        if self.exact is None:
            raise ValueError(f"operator {self.label!r} has no exact entries")
        return self.exact[i][j]

    def radicands(self) -> set:
        if self.exact is None:
            return set()
        return {m for row in self.exact for x in row for m in x.radicands()}

    def is_symmetric(self) -> bool:
        if self.exact is None:
            return bool(np.array_equal(self.matrix, self.matrix.T))
        n = self.dim
        return all(self.exact[i][j] == self.exact[j][i] for i in range(n) for j in range(i))

    def is_hermitian(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def is_diagonal(self) -> bool:
        n = self.dim
        if self.exact is not None:
            return all(not self.exact[i][j] for i in range(n) for j in range(n) if i != j)
        return bool(np.count_nonzero(self.matrix - np.diag(np.diag(self.matrix))) == 0)

    # exact algebra; falls back to float when either side is inexact
    def _combine(self, other: "Operator", fn_exact, fn_float, label):
        if self.dim != other.dim:
            raise ValueError("operator dimension mismatch")
        if self.exact is not None and other.exact is not None:
            return Operator(fn_exact(self.exact, other.exact), label=label)
        return Operator(matrix=fn_float(self.matrix, other.matrix), label=label)

    def __add__(self, other: "Operator") -> "Operator":
        n = self.dim
        return self._combine(
            other,
            lambda a, b: [[a[i][j] + b[i][j] for j in range(n)] for i in range(n)],
            lambda a, b: a + b, f"({self.label}+{other.label})")

    def __sub__(self, other: "Operator") -> "Operator":
        return self + other.scale(-1)

    def __matmul__(self, other: "Operator") -> "Operator":
        n = self.dim

        def mul(a, b):
            out = []
            for i in range(n):
                row = []
                for j in range(n):
                    acc = ZERO
                    for k in range(n):
                        if a[i][k] and b[k][j]:
                            acc = acc + a[i][k] * b[k][j]
                    row.append(acc)
                out.append(row)
            return out

        return self._combine(other, mul, lambda a, b: a @ b, f"{self.label}{other.label}")

    def scale(self, c) -> "Operator":
        if isinstance(c, float) or isinstance(c, complex) or self.exact is None:
            return Operator(matrix=self.matrix * c, label=self.label)
        c = Surd.coerce(c)
        return Operator([[c * x for x in row] for row in self.exact], label=self.label)

    def commutator(self, other: "Operator") -> "Operator":
        return (self @ other) - (other @ self)

    def is_zero(self) -> bool:
        if self.exact is not None:
            return not any(x for row in self.exact for x in row)
        return not np.any(self.matrix)

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        if self.exact is not None and other.exact is not None:
            return self.exact == other.exact
        return bool(np.array_equal(self.matrix, other.matrix))

    __hash__ = None

    def __repr__(self):
        return f"Operator({self.label!r}, dim={self.dim}, exact={self.is_exact})"


def identity(dim: int, label: str = "I") -> Operator:
    return Operator([[ONE if i == j else ZERO for j in range(dim)] for i in range(dim)], label=label)


def diagonal(values: Sequence, label: str = "") -> Operator:
    n = len(values)
    return Operator([[Surd.coerce(values[i]) if i == j else ZERO for j in range(n)]
                     for i in range(n)], label=label)


def number_operator(basis: FockBasis, i: int) -> Operator:
    basis._check_site(i)
    return diagonal([s[i - 1] for s in basis.states], label=f"n{i}")


def transfer_operator(basis: FockBasis, i: int, j: int) -> Operator:
    """Matrix of a_i^dag a_j (moves one particle from site j to site i)."""
    basis._check_site(i)
    basis._check_site(j)
    if i == j:
        return number_operator(basis, i)
    dim = basis.dim
    rows: List[List[Surd]] = [[ZERO] * dim for _ in range(dim)]
    for col, s in enumerate(basis.states):
        if s[j - 1] == 0:
            continue
        t = list(s)
        t[j - 1] -= 1
        t[i - 1] += 1
        t = tuple(t)
        row = basis.index.get(t)
        if row is None:  # Pauli-blocked
            continue
        if basis.statistics == BOSE:
            amp = Surd.sqrt((s[i - 1] + 1) * s[j - 1])
        else:
            amp = Surd.rational(_fermi_sign(s, i - 1, j - 1))
        rows[row][col] = amp
    return Operator(rows, label=f"a{i}+a{j}")


def _fermi_sign(s: Sequence[int], i: int, j: int) -> int:
    # annihilate at j, then create at i; each operator anticommutes past the
    # occupied sites with smaller index
    occ = list(s)
    sign = (-1) ** sum(occ[:j])
    occ[j] = 0
    sign *= (-1) ** sum(occ[:i])
    return sign


def hopping_operator(basis: FockBasis, i: int, j: int) -> Operator:
    """Matrix of a_i^dag a_j + a_j^dag a_i."""
    if i == j:
        raise ValueError("hopping needs two distinct sites; use number_operator for i == j")
    op = transfer_operator(basis, i, j) + transfer_operator(basis, j, i)
    op.label = f"hop{i}{j}"
    return op


def interaction_operator(basis: FockBasis, i: int, j: int) -> Operator:
    """n_i n_j for i != j, n_i (n_i - 1) / 2 for i == j."""
    basis._check_site(i)
    basis._check_site(j)
    if i == j:
        vals = [Surd.rational(s[i - 1] * (s[i - 1] - 1) // 2) for s in basis.states]
    else:
        vals = [s[i - 1] * s[j - 1] for s in basis.states]
    return diagonal(vals, label=f"U{i}{j}")


def expectation(op, state: np.ndarray, rtol: float = 1e-12) -> float:
    """Real value of psi^dag A psi (``state`` is not normalized here)."""
    A = op.float_view if isinstance(op, Operator) else np.asarray(op)
    psi = np.asarray(state)
    if psi.shape != (A.shape[0],):
        raise ValueError(f"state has shape {psi.shape}, operator dimension {A.shape[0]}")
    val = np.vdot(psi, A @ psi)
    scale = np.linalg.norm(A, 2) * np.vdot(psi, psi).real if A.size else 0.0
    if abs(val.imag) > rtol * max(scale, np.finfo(float).tiny):
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}; operator not Hermitian?")
    return float(val.real)
