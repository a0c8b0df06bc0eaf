"""Exact eigenstate-moduli relation f(rho) = 0 of a Hamiltonian family.

Pipeline: symbolic Jacobian [psibar^T H_i | psi^T H_i^T] -> all M x M minors
-> add the expectation relations psibar^T H_i psi - rho_i and the radical
relations s_p^2 - p -> eliminate (psibar, psi, s) with a block order.

Two optional reductions shrink the ideal without changing the variety.

``radicals="rescale"`` swaps the family for a congruent one D H_i D, with D
diagonal and D^2 rational, so that every entry is rational.  psi = D phi is
invertible and preserves each psibar^T H_i psi, so no radical variables
are needed.

``form="real"`` identifies psibar with psi.  Real symmetric families have
real eigenvectors, and the Jacobian collapses to the M x N matrix [psi^T H_i].
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .family import HamiltonianFamily
from .polyring import MPoly, eliminate
from .polyring.algebra import squarefree_part
from .polyring.groebner import DEFAULT_BUDGET, GroebnerStats
from .fock import Operator
from .surd import Surd, prime_factors, split_square

COMPLEX, REAL = "complex", "real"
ADJOIN, RESCALE = "adjoin", "rescale"


class NonExactFamilyError(ValueError):
    pass


class EmptyEliminationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Ring:
    """Variable layout ``(psibar_1..N, psi_1..N, s_p..., rho_1..M)``.

    With ``conjugate=False`` there is no psibar block and psibar_k is psi_k.
    """

    N: int
    primes: Tuple[int, ...]
    labels: Tuple[str, ...]
    conjugate: bool = True

    @property
    def blocks(self) -> int:
        return 2 if self.conjugate else 1

    @property
    def names(self) -> Tuple[str, ...]:
        bar = tuple(f"pb{k}" for k in range(1, self.N + 1)) if self.conjugate else ()
        return (bar + tuple(f"p{k}" for k in range(1, self.N + 1))
                + tuple(f"s{p}" for p in self.primes) + self.labels)

    @property
    def nvars(self) -> int:
        return self.eliminated + len(self.labels)

    @property
    def eliminated(self) -> int:
        return self.blocks * self.N + len(self.primes)

    def var(self, i: int) -> MPoly:
        return MPoly.variable(self.nvars, i, self.names)

    def psibar(self, k: int) -> MPoly:
        return self.var(k) if self.conjugate else self.psi(k)

    def psi(self, k: int) -> MPoly:
        return self.var((self.blocks - 1) * self.N + k)

    def rho(self, i: int) -> MPoly:
        return self.var(self.eliminated + i)

    def radical(self, p: int) -> MPoly:
        return self.var(self.blocks * self.N + self.primes.index(p))

    def surd(self, x: Surd) -> MPoly:
        out = MPoly.zero(self.nvars, self.names)
        for m, c in x:
            term = MPoly.constant(self.nvars, c, self.names)
            for p in prime_factors(m) if m > 1 else ():
                term = term * self.radical(p)
            out = out + term
        return out


def family_ring(family: HamiltonianFamily, form: str = COMPLEX) -> Ring:
    if not family.is_exact:
        raise NonExactFamilyError("symbolic construction needs exact operator entries")
    if form not in (COMPLEX, REAL):
        raise ValueError(f"unknown form {form!r}")
    primes = sorted({p for op in family.operators for m in op.radicands() for p in prime_factors(m)})
    return Ring(family.N, tuple(primes), tuple(family.labels), form == COMPLEX)


def rationalize(family: HamiltonianFamily) -> Tuple[HamiltonianFamily, Tuple[int, ...]]:
    """Congruent family D H_i D with rational entries, D = diag(sqrt(w)).

    Returns the new family and the squarefree weights ``w``.  Raises
    ``ValueError`` when an entry mixes radicals or the couplings around a
    cycle ask for incompatible weights.
    """
    if not family.is_exact:
        raise NonExactFamilyError("rescaling needs exact operator entries")
    N = family.N
    entry = {}
    for i, op in enumerate(family.operators):
        for s in range(N):
            for t in range(N):
                parts = list(op.exact[s][t])
                if len(parts) > 1:
                    raise ValueError(f"entry ({s}, {t}) of {op.label} mixes radicals")
                if parts:
                    entry[i, s, t] = parts[0]
    w: List[Optional[int]] = [None] * N
    for root in range(N):
        if w[root] is not None:
            continue
        w[root] = 1
        stack = [root]
        while stack:
            s = stack.pop()
            for (i, a, t), (m, _) in entry.items():
                if a != s or t == s:
                    continue
                need = split_square(w[s] * m)[1]
                if w[t] is None:
                    w[t] = need
                    stack.append(t)
                elif w[t] != need:
                    raise ValueError("no diagonal rescaling makes the family rational")
    ops = []
    for i, op in enumerate(family.operators):
        rows = [[Surd() for _ in range(N)] for _ in range(N)]
        for s in range(N):
            for t in range(N):
                if (i, s, t) not in entry:
                    continue
                m, c = entry[i, s, t]
                root, rest = split_square(w[s] * w[t] * m)
                if rest != 1:
                    raise ValueError("no diagonal rescaling makes the family rational")
                rows[s][t] = Surd.rational(c * root)
        ops.append(Operator(rows, label=op.label))
    rescaled = HamiltonianFamily(tuple(ops), family.labels, family.kind, family.conserved_total,
                                 family.basis, family.spec)
    return rescaled, tuple(w)


@dataclass(frozen=True)
class SymbolicJacobian:
    ring: Ring
    entries: Tuple[Tuple[MPoly, ...], ...]

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    def substitute(self, psi, psibar=None, radicals: Optional[Dict[int, float]] = None):
        """Numeric matrix at (psi, psibar); radicals default to their positive roots."""
        psi = np.asarray(psi)
        psibar = np.conj(psi) if psibar is None else np.asarray(psibar)
        rad = {p: np.sqrt(p) for p in self.ring.primes}
        rad.update(radicals or {})
        point = (list(psibar) if self.ring.conjugate else []) + list(psi)
        point += [rad[p] for p in self.ring.primes]
        point += [0.0] * len(self.ring.labels)
        out = np.zeros(self.shape, dtype=complex)
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                val = 0j
                for m, c in e.terms.items():
                    v = complex(c)
                    for x, k in zip(point, m):
                        if k:
                            v *= x ** k
                    val += v
                out[i, j] = val
        return out


def symbolic_jacobian(family: HamiltonianFamily, form: str = COMPLEX) -> SymbolicJacobian:
    """[psibar^T H_i | psi^T H_i^T], or just [psi^T H_i] in the real form."""
    R = family_ring(family, form)
    N = R.N
    rows = []
    for op in family.operators:
        A = op.exact
        left = []
        right = []
        for j in range(N):
            lf = MPoly.zero(R.nvars, R.names)
            rf = MPoly.zero(R.nvars, R.names)
            for k in range(N):
                if A[k][j]:
                    lf = lf + R.surd(A[k][j]) * R.psibar(k)
                if A[j][k]:
                    rf = rf + R.surd(A[j][k]) * R.psi(k)
            left.append(lf)
            right.append(rf)
        rows.append(tuple(left + right) if R.conjugate else tuple(left))
    return SymbolicJacobian(R, tuple(rows))


def _det(rows: Sequence[Sequence[MPoly]], nvars: int, names) -> MPoly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    # cofactor expansion along the first row, skipping zero entries
    total = MPoly.zero(nvars, names)
    for j in range(n):
        a = rows[0][j]
        if a.is_zero():
            continue
        sub = [[r[k] for k in range(n) if k != j] for r in rows[1:]]
        d = _det(sub, nvars, names)
        if d.is_zero():
            continue
        total = total + a * d if j % 2 == 0 else total - a * d
    return total


def minor_generators(J: SymbolicJacobian) -> List[MPoly]:
    """Nonzero M x M minors with at most N columns from either block."""
    M, cols = J.shape
    N = J.ring.N
    if M > cols:
        raise ValueError("more rows than columns")
    out = []
    for c in itertools.combinations(range(cols), M):
        k = sum(1 for x in c if x < N)
        if J.ring.conjugate and (k > N or M - k > N):
            continue
        d = _det([[J.entries[r][x] for x in c] for r in range(M)], J.ring.nvars, J.ring.names)
        if not d.is_zero():
            out.append(d)
    return out


def expectation_relations(family: HamiltonianFamily, ring: Optional[Ring] = None) -> List[MPoly]:
    """psibar^T H_i psi - rho_i for every family operator (psi unnormalized)."""
    R = ring or family_ring(family)
    out = []
    for i, op in enumerate(family.operators):
        A = op.exact
        form = MPoly.zero(R.nvars, R.names)
        for a in range(R.N):
            for b in range(R.N):
                if A[a][b]:
                    form = form + R.surd(A[a][b]) * R.psibar(a) * R.psi(b)
        out.append(form - R.rho(i))
    return out


def radical_relations(ring: Ring) -> List[MPoly]:
    return [ring.radical(p) * ring.radical(p) - p for p in ring.primes]


@dataclass
class FunctionalResult:
    generators: List[MPoly]
    labels: Tuple[str, ...]
    principal: Optional[MPoly] = None
    degree: Optional[int] = None
    homogeneous: Optional[bool] = None
    descriptor: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    @property
    def is_principal(self) -> bool:
        return self.principal is not None

    @property
    def relation(self) -> MPoly:
        """The principal relation, or the first generator when the ideal is not principal."""
        if self.principal is not None:
            return self.principal
        if not self.generators:
            raise EmptyEliminationError("no relation was found")
        return self.generators[0]

    def summary(self) -> str:
        kind = "principal" if self.is_principal else f"NOT principal ({len(self.generators)} generators)"
        hom = "homogeneous" if self.homogeneous else "inhomogeneous"
        return f"degree {self.degree}, {hom}, {kind}"


def compute_functional(family: HamiltonianFamily, *, budget: Optional[int] = DEFAULT_BUDGET,
                       strategy: str = "normal", time_limit: Optional[float] = None,
                       form: str = COMPLEX, radicals: str = ADJOIN) -> FunctionalResult:
    """Eliminate the wavefunction from the minor ideal and return the relation in rho."""
    t0 = time.perf_counter()
    if radicals not in (ADJOIN, RESCALE):
        raise ValueError(f"unknown radical handling {radicals!r}")
    if form == REAL:
        if family.M > family.N:
            raise ValueError("the real form needs M <= N")
        if any(np.iscomplexobj(op.float_view) and np.any(op.float_view.imag) for op in family.operators):
            raise ValueError("the real form needs real symmetric operators")
    work, weights = rationalize(family) if radicals == RESCALE else (family, None)
    J = symbolic_jacobian(work, form)
    R = J.ring
    minors = minor_generators(J)
    gens = minors + expectation_relations(work, R) + radical_relations(R)
    stats = GroebnerStats()
    elim = eliminate(gens, R.eliminated, budget=budget, strategy=strategy, stats=stats,
                     time_limit=time_limit)
    rel = [g.drop_variables(R.eliminated, R.labels).primitive() for g in elim]
    info = {
        "minors": len(minors),
        "generators_in": len(gens),
        "eliminated_variables": R.eliminated,
        "radicals": list(R.primes),
        "form": form,
        "radical_handling": radicals,
        "rescaling_weights": list(weights) if weights else None,
        "strategy": strategy,
        "budget": budget,
        "time_limit": time_limit,
        **stats.as_dict(),
    }
    if not rel:
        info["wall_time"] = time.perf_counter() - t0
        raise EmptyEliminationError(
            f"elimination ideal is zero for family {family.descriptor()} ({info})")
    result = FunctionalResult(rel, R.labels, descriptor=family.descriptor(), stats=info)
    if len(rel) == 1:
        f = squarefree_part(rel[0]).primitive()
        result.principal = f
        result.degree = f.total_degree()
        result.homogeneous = f.is_homogeneous()
    else:
        result.degree = max(g.total_degree() for g in rel)
        result.homogeneous = all(g.is_homogeneous() for g in rel)
    info["wall_time"] = time.perf_counter() - t0
    return result


FORMAT = "eigenmoduli.functional/1"


def functional_to_dict(result: FunctionalResult) -> dict:
    from .polyring import serialize

    labels = list(result.labels)
    return {
        "format": FORMAT,
        "labels": labels,
        "degree": result.degree,
        "homogeneous": result.homogeneous,
        "principal": serialize.to_dict(result.principal, labels) if result.principal else None,
        "generators": [serialize.to_dict(g, labels) for g in result.generators],
        "family": result.descriptor,
        "statistics": result.stats,
    }


def functional_from_dict(d: dict) -> FunctionalResult:
    from .polyring import serialize

    if d.get("format") != FORMAT:
        raise serialize.FormatError(f"not a functional document (format {d.get('format')!r})")
    principal = serialize.from_dict(d["principal"]) if d.get("principal") else None
    return FunctionalResult(
        generators=[serialize.from_dict(g) for g in d["generators"]],
        labels=tuple(d["labels"]),
        principal=principal,
        degree=d.get("degree"),
        homogeneous=d.get("homogeneous"),
        descriptor=d.get("family", {}),
        stats=d.get("statistics", {}),
    )
