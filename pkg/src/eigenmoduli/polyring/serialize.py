"""Bit-exact polynomial serialisation.

Text format::

    arity 3
    vars F n1 n2
    6 0 0 64
    5 1 0 -64
    ...

one term per line: exponents then the coefficient as ``p`` or ``p/q``.
The JSON document is ``{"arity", "variables", "terms": [[exps, num, den], ...]}``.
Terms are written in descending grevlex order so output is deterministic.
"""
from __future__ import annotations

from typing import Optional, Sequence

from gmpy2 import mpq

from .mpoly import MPoly
from .orders import GREVLEX


class FormatError(ValueError):
    pass


def _names(p: MPoly, names):
    names = names or p.names or [f"x{i}" for i in range(p.nvars)]
    if len(names) != p.nvars:
        raise FormatError("variable name count does not match arity")
    return list(names)


def to_text(p: MPoly, names: Optional[Sequence[str]] = None) -> str:
    lines = [f"arity {p.nvars}", "vars " + " ".join(_names(p, names))]
    for m, c in p.sorted_terms(GREVLEX):
        coeff = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
        lines.append(" ".join(map(str, m)) + " " + coeff)
    return "\n".join(lines) + "\n"


def from_text(text: str) -> MPoly:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    try:
        head, arity = lines[0].split()
        if head != "arity":
            raise FormatError("first line must be 'arity <k>'")
        n = int(arity)
        vline = lines[1].split()
        if vline[0] != "vars" or len(vline) != n + 1:
            raise FormatError("second line must list the variables")
        terms = {}
        for ln in lines[2:]:
            parts = ln.split()
            if len(parts) != n + 1:
                raise FormatError(f"bad term line {ln!r}")
            num, _, den = parts[-1].partition("/")
            mono = tuple(int(e) for e in parts[:-1])
            if mono in terms:
                raise FormatError(f"duplicate monomial {mono}")
            terms[mono] = mpq(int(num), int(den or 1))
    except (IndexError, ValueError) as exc:
        raise FormatError(str(exc)) from exc
    return MPoly(n, terms, vline[1:])


def to_dict(p: MPoly, names: Optional[Sequence[str]] = None) -> dict:
    return {
        "arity": p.nvars,
        "variables": _names(p, names),
        "terms": [[list(m), str(c.numerator), str(c.denominator)]
                  for m, c in p.sorted_terms(GREVLEX)],
    }


def from_dict(d: dict) -> MPoly:
    try:
        n = int(d["arity"])
        names = list(d["variables"])
        terms = {}
        for exps, num, den in d["terms"]:
            mono = tuple(int(e) for e in exps)
            if len(mono) != n:
                raise FormatError(f"exponent vector {exps} does not match arity {n}")
            terms[mono] = mpq(int(num), int(den))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed polynomial document: {exc}") from exc
    if len(names) != n:
        raise FormatError("variable name count does not match arity")
    return MPoly(n, terms, names)
