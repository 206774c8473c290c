"""GL_n Plancherel densities, the clump closed form, and denominator checks.

A Levi subgroup GL_{l_0} x ... x GL_{l_N} of GL_n is given by its block sizes.
Its density on the torus of unramified twists is

    c_M * prod_{i<j} Gamma^{ij}(z_i, z_j),

    Gamma^{ij} = (z_i - a z_j)(z_i - a^-1 z_j) / ((z_i - b z_j)(z_i - b^-1 z_j)),

with a = q^{|l_i - l_j|/2} and b = q^{(l_i + l_j)/2}.  Block i contributes the
variable z_i (0-based here, printed 1-based).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .integrand import Integrand, basis
from .qfield import (
    ONE,
    ZERO,
    LaurentPoly,
    RatFunc,
    cyclotomic_in_q,
    cyclotomic_label,
    divides_power_of,
    has_common_factor,
    q_integer,
)
from .residue import integrate_torus


def _vq(k: int) -> RatFunc:
    """v^k, i.e. q^(k/2)."""
    return RatFunc.monomial(k)


@dataclass(frozen=True)
class LeviSpec:
    """Block sizes l_0 <= ... <= l_N of a standard Levi subgroup of GL_n."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        if not blocks or any(b < 1 for b in blocks):
            raise ValueError("block sizes must be positive integers")
        if list(blocks) != sorted(blocks):
            raise ValueError("block sizes must be nondecreasing")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def parse(cls, text: str) -> "LeviSpec":
        return cls(tuple(sorted(int(x) for x in text.replace(" ", "").split(",") if x)))

    @property
    def n(self) -> int:
        return sum(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def two_g(self, i: int) -> int:
        """2 g_i = l_i - 1."""
        return self.blocks[i] - 1

    def multiplicities(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for b in self.blocks:
            out[b] = out.get(b, 0) + 1
        return out

    def lower_exp(self, i: int, j: int) -> int:
        """v-exponent of q_ij."""
        return abs(self.blocks[i] - self.blocks[j])

    def upper_exp(self, i: int, j: int) -> int:
        """v-exponent of q^ij."""
        return self.blocks[i] + self.blocks[j]

    def label(self) -> str:
        return ",".join(str(b) for b in self.blocks)


def partitions(n: int) -> Iterator[LeviSpec]:
    """All partitions of n as nondecreasing block lists."""

    def rec(remaining: int, smallest: int):
        if remaining == 0:
            yield ()
            return
        for first in range(smallest, remaining + 1):
            for rest in rec(remaining - first, first):
                yield (first,) + rest

    for p in rec(n, 1):
        yield LeviSpec(p)


# ---------------------------------------------------------------------------
# densities


def gamma_factors(levi: LeviSpec, i: int, j: int, nvars: int) -> list:
    """Raw factors of Gamma^{ij} for :meth:`Integrand.build`."""
    zi, zj = basis(nvars, i), basis(nvars, j)
    a, b = levi.lower_exp(i, j), levi.upper_exp(i, j)
    return [
        (zi, zj, _vq(a), 1),
        (zi, zj, _vq(-a), 1),
        (zi, zj, _vq(b), -1),
        (zi, zj, _vq(-b), -1),
    ]


def density_integrand(levi: LeviSpec) -> Integrand:
    """prod_{i<j} Gamma^{ij} times (z_0 ... z_N)^-1, for integration against dz."""
    k = len(levi)
    raw = []
    for i in range(k):
        for j in range(i + 1, k):
            raw.extend(gamma_factors(levi, i, j, k))
    return Integrand.build(ONE, tuple([-1] * k), raw)


def c_M(levi: LeviSpec) -> RatFunc:
    """The constant of the Levi summand.

    The product of q^{2g+1} over the Gamma_{i,j,g} factors telescopes to
    q^{sum_{i<j} l_i l_j}.
    """
    ls = levi.blocks
    n = levi.n
    q = RatFunc.q()
    cross = sum(ls[i] * ls[j] for i in range(len(ls)) for j in range(i + 1, len(ls)))
    out = q**cross
    for l in ls:
        out = out * q ** (l * l - l) * (q - 1) ** l / ((q**l - 1) * l)
    # q^{(n - n^2)/2}; n - n^2 is always even
    return out * q ** ((n - n * n) // 2)


def build_gln_density(levi: LeviSpec) -> tuple[RatFunc, Integrand]:
    return c_M(levi), density_integrand(levi)


# ---------------------------------------------------------------------------
# the clump closed form


def _one_minus(k: int) -> RatFunc:
    """1 - v^k."""
    return ONE - _vq(k)


def _Q_exp(levi: LeviSpec, clump: tuple[int, ...], r: int, k: int) -> int:
    """v-exponent of Q_rk = q^{i_k i_{k+1}} ... q^{i_r i_{r+1}}."""
    return sum(levi.upper_exp(clump[s], clump[s + 1]) for s in range(r, k + 1))


def clump_factor(levi: LeviSpec, clump: tuple[int, ...], literal: bool = False) -> RatFunc:
    """Post-cancellation contribution of one clump (i_0, ..., i_t).

    The surviving numerator at (r, k) is 1 - Q_rk q^{g_{i_r} - g_{i_{k+1}}}, and at
    k = t - 1 both factors 1 - Q_{r,t-1} q^{+-(g_{i_r} - g_{i_t})} survive.  With
    ``literal=True`` the g-indices are shifted down by one (i_k and i_{t-1}),
    which disagrees with direct residue evaluation once block sizes differ.
    """
    t = len(clump) - 1
    if t == 0:
        return ONE
    ls = [levi.blocks[i] for i in clump]
    two_g = [levi.two_g(i) for i in clump]
    out = _one_minus(2 * ls[0]) * _one_minus(2 * ls[1]) / _one_minus(2 * ls[0] + 2 * ls[1])
    for k in range(1, t):
        out = out * _one_minus(2 * ls[k + 1]) / _one_minus(2 * ls[k] + 2 * ls[k + 1])
        for r in range(k):
            Q = _Q_exp(levi, clump, r, k)
            # Q_rk q^{i_r i_{k+1}} = q^{l_{i_r} + ... + l_{i_{k+1}}}
            den = _one_minus(Q + ls[r] + ls[k + 1])
            if k < t - 1:
                partner = k if literal else k + 1
                R = _one_minus(Q + two_g[r] - two_g[partner])
            else:
                partner, other = (t - 1, k) if literal else (t, t)
                R = _one_minus(Q + two_g[r] - two_g[partner]) * _one_minus(Q + two_g[other] - two_g[r])
            out = out * R / den
    return out


def clump_factor_uncancelled(levi: LeviSpec, clump: tuple[int, ...]) -> RatFunc:
    """Pre-cancellation contribution of one clump: the raw residue constants."""
    out = ONE
    for k in range(len(clump) - 1):
        a = levi.lower_exp(clump[k], clump[k + 1])
        b = levi.upper_exp(clump[k], clump[k + 1])
        out = out * _one_minus(b + a) * _one_minus(b - a) / _one_minus(2 * b)
        for r in range(k):
            Q = _Q_exp(levi, clump, r, k)
            a = levi.lower_exp(clump[r], clump[k + 1])
            b = levi.upper_exp(clump[r], clump[k + 1])
            out = out * _one_minus(Q + a) * _one_minus(Q - a) / (_one_minus(Q + b) * _one_minus(Q - b))
    return out


def ordered_block_structures(indices: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Set partitions whose blocks start at their minimum and are otherwise ordered freely.

    These are the branches of the bookkeeping trees: each block is a clump
    (or a lone z_i = 0 decoration when it has one element).
    """
    if not indices:
        yield ()
        return
    head, rest = indices[0], indices[1:]
    for size in range(len(rest) + 1):
        for tail in _arrangements(rest, size):
            remaining = tuple(i for i in rest if i not in tail)
            for others in ordered_block_structures(remaining):
                yield ((head,) + tail,) + others


def _arrangements(items: tuple[int, ...], size: int) -> Iterator[tuple[int, ...]]:
    if size == 0:
        yield ()
        return
    for idx, x in enumerate(items):
        for tail in _arrangements(items[:idx] + items[idx + 1 :], size - 1):
            yield (x,) + tail


def closed_form_value(levi: LeviSpec, form: str = "post") -> RatFunc:
    """Sum over branches of the product of clump factors (no outer constants).

    ``form`` is ``"post"`` (cancelled clump factors), ``"pre"`` (raw residue
    constants) or ``"literal"`` (cancelled form with down-shifted g-indices).
    """
    factor = {
        "post": clump_factor,
        "pre": clump_factor_uncancelled,
        "literal": lambda lv, c: clump_factor(lv, c, literal=True),
    }[form]
    blocks = levi.blocks

    @lru_cache(maxsize=None)
    def clump_value(clump: tuple[int, ...]) -> RatFunc:
        return factor(levi, clump)

    @lru_cache(maxsize=None)
    def total(indices: tuple[int, ...]) -> RatFunc:
        if not indices:
            return ONE
        head, rest = indices[0], indices[1:]
        acc = ZERO
        for size in range(len(rest) + 1):
            for tail in _arrangements(rest, size):
                remaining = tuple(i for i in rest if i not in tail)
                acc = acc + clump_value((head,) + tail) * total(remaining)
        return acc

    return total(tuple(range(len(blocks))))


def engine_value(levi: LeviSpec, **engine_options) -> RatFunc:
    return integrate_torus(density_integrand(levi), **engine_options)


def fd1(levi: LeviSpec, rank: int = 1, value: RatFunc | None = None) -> RatFunc:
    """rank / prod m_j! * c_M * (integral of the density)."""
    if rank < 1:
        raise ValueError("rank must be positive")
    if value is None:
        value = closed_form_value(levi)
    sym = math.prod(math.factorial(m) for m in levi.multiplicities().values())
    return RatFunc.const(Fraction(rank, sym)) * c_M(levi) * value


# ---------------------------------------------------------------------------
# Poincare polynomials and singularities


def poincare_sym(n: int) -> LaurentPoly:
    """P_{S_n}(q) = prod_{i=1}^{n-1} (1 + q + ... + q^i)."""
    out = LaurentPoly.monomial(0)
    for i in range(2, n + 1):
        out = out * q_integer(i)
    return out


def singular_classes(value: RatFunc, n: int) -> list[int]:
    """Orders d in 2..n whose primitive d-th roots of unity (in q) are poles of value."""
    return [d for d in range(2, n + 1) if has_common_factor(value.den, cyclotomic_in_q(d))]


@dataclass(frozen=True)
class SingularityReport:
    levi: LeviSpec
    fd1: RatFunc
    divides_k: int | None
    singular: tuple[int, ...]
    regular: tuple[int, ...]

    def labels(self, classes) -> list[str]:
        return [cyclotomic_label(d) for d in classes]


def singularity_report(levi: LeviSpec, rank: int = 1, value: RatFunc | None = None) -> SingularityReport:
    f = fd1(levi, rank, value)
    n = levi.n
    sing = singular_classes(f, n)
    reg = [d for d in range(2, n + 1) if d not in sing]
    k = divides_power_of(f.den, poincare_sym(n))
    return SingularityReport(levi, f, k, tuple(sing), tuple(reg))


def numerator_degree(value: RatFunc) -> int:
    """Highest v-power of the numerator in canonical form."""
    return value.num.degree() if not value.is_zero() else 0


def conjectured_numerator_degree(n: int) -> int:
    """Largest numerator v-degree of fd1 over the cells of GL_n, (n - 1)(n + 2).

    Measured, not proved: it matches every partition of n <= 7 and is
    attained by the one-block cell (n).  The report recomputes the maximum.
    """
    return (n - 1) * (n + 2)
