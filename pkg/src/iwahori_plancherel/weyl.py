"""Degrees, exponents and Poincare polynomials of finite Weyl groups.

>>> from iwahori_plancherel.qfield import RatFunc
>>> RatFunc.from_poly(poincare("C2")).to_text()
'1+2*q+2*q^2+2*q^3+q^4'
"""
from __future__ import annotations

import re

from .qfield import LaurentPoly, q_integer


def degrees(cartan: str) -> tuple[int, ...]:
    """Degrees of the basic invariants for a type such as ``A3``, ``C2`` or ``G2``."""
    m = re.fullmatch(r"([A-G])\(?(\d+)\)?", cartan.replace(" ", ""))
    if not m:
        raise ValueError("unsupported Weyl group type %r" % cartan)
    kind, rank = m.group(1), int(m.group(2))
    if rank < 1:
        raise ValueError("rank must be positive")
    if kind == "A":
        return tuple(range(2, rank + 2))
    if kind in "BC":
        return tuple(2 * i for i in range(1, rank + 1))
    if kind == "D" and rank >= 2:
        return tuple(2 * i for i in range(1, rank)) + (rank,)
    exceptional = {
        ("G", 2): (2, 6),
        ("F", 4): (2, 6, 8, 12),
        ("E", 6): (2, 5, 6, 8, 9, 12),
        ("E", 7): (2, 6, 8, 10, 12, 14, 18),
        ("E", 8): (2, 8, 12, 14, 18, 20, 24, 30),
    }
    if (kind, rank) in exceptional:
        return exceptional[(kind, rank)]
    raise ValueError("unsupported Weyl group type %r" % cartan)


def exponents(cartan: str) -> tuple[int, ...]:
    return tuple(d - 1 for d in degrees(cartan))


def poincare(cartan: str) -> LaurentPoly:
    """P_W(q) = prod [d_i]_q, written in v = q^(1/2).

    ``A(n-1)`` gives P_{S_n}; for example ``A2`` is (1+q)(1+q+q^2).
    """
    out = LaurentPoly.monomial(0)
    for d in degrees(cartan):
        out = out * q_integer(d)
    return out
