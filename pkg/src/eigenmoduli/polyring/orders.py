"""Monomial orders.

An order is realised as a *rank* function: a tuple of ints such that the
larger monomial has the smaller rank.  Ranks sort with the builtin tuple
comparison and feed ``heapq`` directly, which keeps the reduction loops free
of custom comparators.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

Monomial = Tuple[int, ...]

KINDS = ("grevlex", "lex", "grlex", "block")


@dataclass(frozen=True)
class MonomialOrder:
    kind: str = "grevlex"
    block: int = 0
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block" and self.block < 1:
            raise ValueError("block order needs a front-block size >= 1")

    def rank(self, m: Monomial) -> tuple:
        r = self._cache.get(m)
        if r is None:
            r = self._rank(m)
            self._cache[m] = r
        return r

    def _rank(self, m: Monomial) -> tuple:
        if self.kind == "grevlex":
            return (-sum(m),) + m[::-1]
        if self.kind == "lex":
            return tuple(-e for e in m)
        if self.kind == "grlex":
            return (-sum(m),) + tuple(-e for e in m)
        k = self.block
        front, back = m[:k], m[k:]
        return (-sum(front),) + front[::-1] + (-sum(back),) + back[::-1]

    def key(self, m: Monomial) -> tuple:
        """Sort key increasing with the monomial (``sorted(..., key=order.key)``)."""
        return tuple(-x for x in self.rank(m))

    def greater(self, a: Monomial, b: Monomial) -> bool:
        return self.rank(a) < self.rank(b)

    def max(self, monomials):
        return min(monomials, key=self.rank)

    def __str__(self) -> str:
        return f"block({self.block})" if self.kind == "block" else self.kind


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def block_order(k: int) -> MonomialOrder:
    """Elimination order: first ``k`` variables >> the rest, grevlex in each block."""
    return MonomialOrder("block", k)


def as_order(order) -> MonomialOrder:
    if isinstance(order, MonomialOrder):
        return order
    if isinstance(order, str):
        if order.startswith("block"):
            return block_order(int(order[order.index("(") + 1:order.index(")")]))
        return MonomialOrder(order)
    raise TypeError(f"cannot interpret {order!r} as a monomial order")
