"""Buchberger's algorithm, normal forms and elimination ideals.

The engine works on private ``_Elem`` records (monic, tail pre-sorted) and
converts back to :class:`MPoly` at the boundary.  Pair pruning uses the
Gebauer-Moeller installation of Buchberger's product and chain criteria.
"""
from __future__ import annotations

import heapq
import logging
import time
from dataclasses import dataclass, field
from operator import add, ge, sub
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .mpoly import ArityError, MPoly
from .orders import GREVLEX, Monomial, MonomialOrder, as_order, block_order

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10_000_000


@dataclass
class GroebnerStats:
    pairs_total: int = 0
    pairs_pruned: int = 0
    pairs_reduced: int = 0
    zero_reductions: int = 0
    reduction_steps: int = 0
    basis_size: int = 0
    max_degree: int = 0
    term_operations: int = 0
    max_coefficient_bits: int = 0
    wall_time: float = 0.0

    def as_dict(self):
        return dict(self.__dict__)


class BudgetExceeded(RuntimeError):
    """Raised when the step budget or the time limit is used up; carries partial stats."""

    def __init__(self, stats: GroebnerStats, budget: Optional[int], time_limit: Optional[float] = None):
        self.stats = stats
        self.budget = budget
        self.time_limit = time_limit
        what = (f"time limit of {time_limit:g}s" if time_limit is not None
                else f"budget of {budget} reduction steps")
        super().__init__(
            f"Groebner {what} exceeded "
            f"(steps {stats.reduction_steps}, pairs reduced {stats.pairs_reduced}, "
            f"basis size {stats.basis_size}, max degree {stats.max_degree}, "
            f"coefficients up to {stats.max_coefficient_bits} bits, {stats.wall_time:.1f}s)")


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(map(ge, b, a))


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(max, a, b))


def _disjoint(a: Monomial, b: Monomial) -> bool:
    return not any(x and y for x, y in zip(a, b))


class _Elem:
    __slots__ = ("lm", "tail", "sugar")

    def __init__(self, lm, tail, sugar):
        self.lm = lm          # leading monomial, coefficient is 1
        self.tail = tail      # list of (monomial, coeff)
        self.sugar = sugar


def _make_elem(terms: Dict[Monomial, mpq], order: MonomialOrder, sugar=None) -> _Elem:
    lm = order.max(terms)
    inv = 1 / terms[lm]
    tail = [(m, c * inv) for m, c in terms.items() if m != lm]
    if sugar is None:
        sugar = max(sum(m) for m in terms)
    return _Elem(lm, tail, sugar)


class _Reducer:
    """Full reduction of dicts modulo a growing list of monic elements."""

    def __init__(self, order: MonomialOrder, stats: GroebnerStats, budget: Optional[int],
                 time_limit: Optional[float] = None):
        self.order = order
        self.stats = stats
        self.budget = budget
        self.time_limit = time_limit
        self.t0 = time.perf_counter()
        self.deadline = None if time_limit is None else self.t0 + time_limit
        self.elems: List[_Elem] = []
        self.hit: Dict[Monomial, int] = {}

    def add(self, e: _Elem) -> int:
        self.elems.append(e)
        return len(self.elems) - 1

    def find(self, m: Monomial, usable, usable_set) -> Optional[int]:
        i = self.hit.get(m)
        if i is not None and i in usable_set:
            return i
        for i in usable:
            if all(map(ge, m, self.elems[i].lm)):
                self.hit[m] = i
                return i
        return None

    def reduce(self, terms: Dict[Monomial, mpq], usable, full=True) -> Dict[Monomial, mpq]:
        rank = self.order.rank
        p = dict(terms)
        heap = [(rank(m), m) for m in p]
        heapq.heapify(heap)
        out: Dict[Monomial, mpq] = {}
        usable_set = set(usable)
        budget = self.budget
        stats = self.stats
        while heap:
            _, m = heapq.heappop(heap)
            c = p.pop(m, None)
            if c is None:
                continue
            i = self.find(m, usable, usable_set)
            if i is None:
                out[m] = c
                if not full:
                    out.update(p)
                    break
                continue
            g = self.elems[i]
            alpha = tuple(map(sub, m, g.lm))
            for gm, gc in g.tail:
                nm = tuple(map(add, gm, alpha))
                old = p.get(nm)
                if old is None:
                    p[nm] = -c * gc
                    heapq.heappush(heap, (rank(nm), nm))
                else:
                    v = old - c * gc
                    if v:
                        p[nm] = v
                    else:
                        del p[nm]
            stats.reduction_steps += 1
            stats.term_operations += len(g.tail)
            if budget is not None and stats.reduction_steps > budget:
                self.fail(budget_hit=True)
            if self.deadline is not None and time.perf_counter() > self.deadline:
                self.fail(budget_hit=False)
        return out

    def fail(self, budget_hit: bool):
        self.stats.wall_time = time.perf_counter() - self.t0
        raise BudgetExceeded(self.stats, self.budget, None if budget_hit else self.time_limit)


def _common_arity(polys: Sequence[MPoly]) -> int:
    if not polys:
        raise ValueError("empty generator list")
    n = polys[0].nvars
    for p in polys:
        if p.nvars != n:
            raise ArityError("generators have different arities")
    return n


def normal_form(p: MPoly, G: Sequence[MPoly], order=GREVLEX) -> MPoly:
    """Remainder of multivariate division of ``p`` by ``G`` (fully reduced)."""
    order = as_order(order)
    _common_arity([p, *G])
    if any(g.is_zero() for g in G):
        raise ValueError("divisor list contains the zero polynomial")
    red = _Reducer(order, GroebnerStats(), None)
    for g in G:
        red.add(_make_elem(g.terms, order))
    out = red.reduce(p.terms, range(len(G)))
    return MPoly._raw(p.nvars, out, p.names)


def s_polynomial(f: MPoly, g: MPoly, order=GREVLEX) -> MPoly:
    order = as_order(order)
    lf, lg = f.leading_monomial(order), g.leading_monomial(order)
    L = _lcm(lf, lg)
    a = f.mul_term(tuple(map(sub, L, lf)), 1 / f.terms[lf])
    b = g.mul_term(tuple(map(sub, L, lg)), 1 / g.terms[lg])
    return a - b


@dataclass(order=True)
class _Pair:
    key: tuple
    i: int = field(compare=False)
    j: int = field(compare=False)
    lcm: Monomial = field(compare=False)


def buchberger(generators: Sequence[MPoly], order=GREVLEX, *, budget: Optional[int] = DEFAULT_BUDGET,
               strategy: str = "normal", stats: Optional[GroebnerStats] = None,
               time_limit: Optional[float] = None) -> List[MPoly]:
    """Reduced Groebner basis of the ideal spanned by ``generators``.

    ``strategy`` picks the next critical pair: ``"normal"`` takes the smallest
    total degree of the lcm, ``"sugar"`` the smallest sugar degree; ties break
    on the lcm in the monomial order, then on the pair indices.  Raises :class:`BudgetExceeded` once more than
    ``budget`` reduction steps have been spent (``None`` disables the guard)
    or, when ``time_limit`` is given, once that many seconds have passed.
    A single step can get expensive as coefficients grow, so the step count
    alone does not bound the running time.
    """
    order = as_order(order)
    nvars = _common_arity(list(generators))
    names = next((g.names for g in generators if g.names), None)
    if any(g.is_zero() for g in generators):
        raise ValueError("zero generator")
    if strategy not in ("normal", "sugar"):
        raise ValueError(f"unknown selection strategy {strategy!r}")
    stats = stats if stats is not None else GroebnerStats()
    t0 = time.perf_counter()
    red = _Reducer(order, stats, budget, time_limit)

    def pair_key(i, j, L):
        d = sum(L)
        if strategy == "sugar":
            ei, ej = red.elems[i], red.elems[j]
            s = max(ei.sugar - sum(ei.lm), ej.sugar - sum(ej.lm)) + d
            return (s, d, order.key(L), i, j)
        # ties go to the smaller lcm in the monomial order, which matters
        # a lot for elimination orders that are not degree-compatible
        return (d, order.key(L), i, j)

    active: List[int] = []
    pairs: List[_Pair] = []

    def update(h: int):
        nonlocal active, pairs
        lh = red.elems[h].lm
        cand = [(g, _lcm(red.elems[g].lm, lh)) for g in active]
        stats.pairs_total += len(cand)
        # chain criterion among the new pairs
        keep = []
        for idx, (g, L) in enumerate(cand):
            if _disjoint(red.elems[g].lm, lh):
                keep.append((g, L))
                continue
            redundant = False
            for jdx, (g2, L2) in enumerate(cand):
                if jdx == idx:
                    continue
                if _divides(L2, L) and (L2 != L or jdx < idx):
                    redundant = True
                    break
            if not redundant:
                keep.append((g, L))
        new = [(g, L) for g, L in keep if not _disjoint(red.elems[g].lm, lh)]
        stats.pairs_pruned += len(cand) - len(new)
        # chain criterion on old pairs
        old = []
        for pr in pairs:
            if (_divides(lh, pr.lcm)
                    and _lcm(red.elems[pr.i].lm, lh) != pr.lcm
                    and _lcm(red.elems[pr.j].lm, lh) != pr.lcm):
                stats.pairs_pruned += 1
                continue
            old.append(pr)
        for g, L in new:
            i, j = (g, h) if g < h else (h, g)
            old.append(_Pair(pair_key(i, j, L), i, j, L))
        heapq.heapify(old)
        pairs = old
        active = [g for g in active if not _divides(lh, red.elems[g].lm)] + [h]

    # interreduce-free seeding: reduce each generator by the ones already in
    for g in sorted(generators, key=lambda p: (p.total_degree(), len(p))):
        r = red.reduce(g.terms, active)
        if r:
            e = _make_elem(r, order, sugar=g.total_degree())
            update(red.add(e))

    while pairs:
        pr = heapq.heappop(pairs)
        ei, ej = red.elems[pr.i], red.elems[pr.j]
        L = pr.lcm
        ai = tuple(map(sub, L, ei.lm))
        aj = tuple(map(sub, L, ej.lm))
        spoly: Dict[Monomial, mpq] = {}
        for m, c in ei.tail:
            spoly[tuple(map(add, m, ai))] = c
        for m, c in ej.tail:
            nm = tuple(map(add, m, aj))
            v = spoly.get(nm, 0) - c
            if v:
                spoly[nm] = v
            else:
                spoly.pop(nm, None)
        stats.pairs_reduced += 1
        sugar = max(ei.sugar + sum(ai), ej.sugar + sum(aj))
        r = red.reduce(spoly, active) if spoly else {}
        if not r:
            stats.zero_reductions += 1
            continue
        e = _make_elem(r, order, sugar=sugar)
        stats.max_degree = max(stats.max_degree, max(sum(m) for m in r))
        stats.max_coefficient_bits = max(
            stats.max_coefficient_bits,
            max(int(c.numerator).bit_length() + int(c.denominator).bit_length() for c in r.values()))
        h = red.add(e)
        update(h)
        stats.basis_size = len(active)
        stats.wall_time = time.perf_counter() - t0
        if stats.pairs_reduced % 200 == 0:
            log.debug("pairs %d left %d basis %d steps %d", stats.pairs_reduced, len(pairs),
                      len(active), stats.reduction_steps)

    # reduced basis: active is already minimal; tail-reduce each element
    final = []
    for idx in active:
        others = [k for k in active if k != idx]
        e = red.elems[idx]
        tail = red.reduce(dict(e.tail), others)
        tail[e.lm] = mpq(1)
        final.append(MPoly._raw(nvars, tail, names))
    final.sort(key=lambda p: order.rank(p.leading_monomial(order)), reverse=True)
    stats.basis_size = len(final)
    stats.wall_time = time.perf_counter() - t0
    return final


def is_groebner(G: Sequence[MPoly], order=GREVLEX) -> bool:
    """Check that every S-polynomial of ``G`` reduces to zero modulo ``G``."""
    order = as_order(order)
    for a in range(len(G)):
        for b in range(a + 1, len(G)):
            if not normal_form(s_polynomial(G[a], G[b], order), G, order).is_zero():
                return False
    return True


def is_reduced_groebner(G: Sequence[MPoly], order=GREVLEX) -> bool:
    order = as_order(order)
    if not is_groebner(G, order):
        return False
    lms = [g.leading_monomial(order) for g in G]
    for g, lm in zip(G, lms):
        if g.terms[lm] != 1:
            return False
        for other in lms:
            if other is lm:
                continue
            if any(_divides(other, m) for m in g.terms):
                return False
    return True


def eliminate(generators: Sequence[MPoly], k: int, *, budget: Optional[int] = DEFAULT_BUDGET,
              strategy: str = "normal", stats: Optional[GroebnerStats] = None,
              time_limit: Optional[float] = None) -> List[MPoly]:
    """Generators of ``<generators>`` intersected with the ring of variables ``k, k+1, ...``.

    The result still lives in the full ring (arity unchanged); use
    :meth:`MPoly.drop_variables` to move it to the smaller ring.
    """
    n = _common_arity(list(generators))
    if not 0 < k < n:
        raise ValueError(f"cannot eliminate {k} of {n} variables")
    G = buchberger(generators, block_order(k), budget=budget, strategy=strategy, stats=stats,
                   time_limit=time_limit)
    return [g for g in G if not any(any(m[:k]) for m in g.terms)]
