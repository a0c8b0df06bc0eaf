"""Exact division, gcd and squarefree parts built on the Groebner engine.

gcd(f, g) = f g / lcm(f, g), and lcm(f, g) generates <t f, (1 - t) g> cut
down to the ring without t.  Slow compared to dedicated gcd algorithms but
adequate for the small relations produced here.
"""
from __future__ import annotations

from operator import ge, sub
from typing import Optional, Tuple

from .groebner import DEFAULT_BUDGET, eliminate
from .mpoly import ArityError, MPoly
from .orders import LEX


def divide(f: MPoly, g: MPoly) -> Tuple[MPoly, MPoly]:
    """Quotient and remainder of ``f`` by a single nonzero ``g`` (lex order)."""
    if f.nvars != g.nvars:
        raise ArityError("arity mismatch")
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lg = g.leading_monomial(LEX)
    cg = g.terms[lg]
    q = {}
    r = {}
    p = f
    while not p.is_zero():
        lp = p.leading_monomial(LEX)
        cp = p.terms[lp]
        if all(map(ge, lp, lg)):
            mono = tuple(map(sub, lp, lg))
            c = cp / cg
            q[mono] = q.get(mono, 0) + c
            p = p - g.mul_term(mono, c)
        else:
            r[lp] = cp
            p = p - MPoly(f.nvars, {lp: cp})
    return MPoly(f.nvars, q, f.names), MPoly(f.nvars, r, f.names)


def divide_exact(f: MPoly, g: MPoly) -> MPoly:
    q, r = divide(f, g)
    if not r.is_zero():
        raise ValueError("division is not exact")
    return q


def _content_monomial(f: MPoly):
    return tuple(min(m[i] for m in f.terms) for i in range(f.nvars))


def lcm(f: MPoly, g: MPoly, budget: Optional[int] = DEFAULT_BUDGET) -> MPoly:
    if f.is_zero() or g.is_zero():
        return MPoly.zero(f.nvars, f.names)
    n = f.nvars
    fe = f.embed(n + 1, range(1, n + 1))
    ge_ = g.embed(n + 1, range(1, n + 1))
    t = MPoly.variable(n + 1, 0)
    G = eliminate([t * fe, (1 - t) * ge_], 1, budget=budget)
    if len(G) != 1:
        raise RuntimeError("lcm ideal is not principal")  # cannot happen over a field
    return G[0].drop_variables(1, f.names).primitive()


def gcd(f: MPoly, g: MPoly, budget: Optional[int] = DEFAULT_BUDGET) -> MPoly:
    """Greatest common divisor, primitive with positive leading coefficient."""
    if f.nvars != g.nvars:
        raise ArityError("arity mismatch")
    if f.is_zero():
        return g.primitive() if not g.is_zero() else g
    if g.is_zero():
        return f.primitive()
    # pull out the monomial contents first; the ideal computation then sees smaller inputs
    cf, cg = _content_monomial(f), _content_monomial(g)
    common = tuple(map(min, cf, cg))
    f0 = divide_exact(f, MPoly(f.nvars, {cf: 1}))
    g0 = divide_exact(g, MPoly(g.nvars, {cg: 1}))
    mono = MPoly(f.nvars, {common: 1}, f.names)
    if f0.total_degree() == 0 or g0.total_degree() == 0:
        return mono
    L = lcm(f0, g0, budget)
    return (divide_exact(f0 * g0, L) * mono).primitive()


def squarefree_part(f: MPoly, budget: Optional[int] = DEFAULT_BUDGET) -> MPoly:
    """``f`` with repeated irreducible factors reduced to multiplicity one."""
    if f.total_degree() <= 0:
        return f
    g = f
    for i in sorted(f.variables()):
        g = gcd(g, f.diff(i), budget)
        if g.total_degree() == 0:
            return f
    return divide_exact(f, g)
