"""Floating-point check of exact torus integrals by the trapezoidal rule.

On |z| = 1 with z = exp(i theta), (2 pi i)^-1 times the integral of g dz is the
mean of g(z) z over theta.  Integrands here are smooth and periodic on the
torus for q > 1, so equal-angle sampling converges geometrically in the grid
size.  Exact reference values are evaluated with mpmath at 40 digits, so
measured errors are not polluted by rounding the reference.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .integrand import ContourPoleError, Integrand
from .qfield import CycRational, RatFunc, _coeff_complex, sqrt_q

NEAR_SINGULAR = 1e-13
EXACT_DIGITS = 40
# errors below ROUNDOFF_ULPS * eps * mean|sample| are indistinguishable from rounding
ROUNDOFF_ULPS = 64


class NearSingularError(ArithmeticError):
    """A factor of the integrand (almost) vanishes at the sample point."""


def eval_integrand_numeric(f: Integrand, q0: float, point: Sequence[complex]) -> complex:
    """Complex value of f at a torus point, with v = +sqrt(q0).

    >>> from iwahori_plancherel.integrand import Integrand
    >>> round(eval_integrand_numeric(Integrand.build(RatFunc.q(), (-1,), []), 4, (1j,)).real, 12)
    0.0
    """
    if len(point) != len(f.prefactor):
        raise ValueError("point has %d entries for %d variables" % (len(point), len(f.prefactor)))
    for z in point:
        if abs(abs(complex(z)) - 1) > 1e-9:
            raise ValueError("point is not on the unit torus")
    v = sqrt_q(float(q0))
    for fac in f.factors:
        base = _mono(fac.left, point) - complex(fac.coeff.at_v(v)) * _mono(fac.right, point)
        if fac.power < 0 and abs(base) < NEAR_SINGULAR:
            raise NearSingularError("denominator factor vanishes at %r" % (tuple(point),))
    return f.evaluate(point, v)


def _mono(m, point) -> complex:
    out = 1 + 0j
    for e, z in zip(m, point):
        if e:
            out *= complex(z) ** e
    return out


@dataclass(frozen=True)
class QuadratureSpec:
    q0: float
    grid_n: int = 1024
    variables: int | None = None

    def __post_init__(self):
        if not self.q0 > 1:
            raise ValueError("q0 must be a real number > 1")
        n = self.grid_n
        if n < 64 or n & (n - 1):
            raise ValueError("grid_n must be a power of two >= 64")
        if self.variables is not None and not 0 <= self.variables <= 4:
            raise ValueError("at most 4 torus variables")


def check_contour(f: Integrand, q0: float) -> None:
    """Raise ContourPoleError if a denominator factor can vanish on the torus at q0.

    z^a - c z^b has zeros on the torus exactly when |c| = 1.
    """
    v = sqrt_q(float(q0))
    for fac in f.factors:
        if fac.power < 0 and abs(abs(complex(fac.coeff.at_v(v))) - 1) < 1e-12:
            raise ContourPoleError("factor z^%s - [%s] z^%s vanishes on the unit torus at q = %s" % (fac.left, fac.coeff.to_text(), fac.right, q0))


def _factor_table(f: Integrand, v: float):
    out = []
    for fac in f.factors:
        out.append((np.array(fac.left), complex(fac.coeff.at_v(v)), np.array(fac.right), fac.power))
    return out


def _chunk_values(scalar: complex, prefactor, table, zs: list) -> np.ndarray:
    """Integrand times prod z_i on a block of points; zs[i] is an array or a scalar."""
    val = scalar * np.ones(np.broadcast(*zs).shape, dtype=complex) if zs else np.array([scalar])
    for i, e in enumerate(prefactor):
        if e + 1:
            val = val * zs[i] ** (e + 1)
    for left, c, right, power in table:
        lhs = 1
        rhs = 1
        for i, e in enumerate(left):
            if e:
                lhs = lhs * zs[i] ** int(e)
        for i, e in enumerate(right):
            if e:
                rhs = rhs * zs[i] ** int(e)
        base = lhs - c * rhs
        if power < 0 and np.min(np.abs(base)) < NEAR_SINGULAR:
            raise NearSingularError("sample on a denominator zero")
        val = val * base**power
    return val


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    roundoff: float
    samples: int


def quadrature(f: Integrand, spec: QuadratureSpec) -> complex:
    """Trapezoidal approximation of (2 pi i)^-k times the integral of f dz_1 ... dz_k."""
    return quadrature_result(f, spec).value


def quadrature_result(f: Integrand, spec: QuadratureSpec) -> QuadratureResult:
    """Trapezoidal approximation of (2 pi i)^-k times the integral of f dz_1 ... dz_k.

    When f has total degree -k it is invariant under a common rotation of all
    variables, so the last active variable is pinned to 1 and one dimension
    of the grid is dropped.
    """
    if f.is_zero():
        return QuadratureResult(0j, 0.0, 0)
    active = list(f.active)
    if spec.variables is not None and spec.variables != len(active):
        raise ValueError("spec expects %d variables, integrand has %d" % (spec.variables, len(active)))
    if len(active) > 4:
        raise ValueError("at most 4 torus variables")
    check_contour(f, spec.q0)
    v = sqrt_q(float(spec.q0))
    scalar = complex(f.scalar.at_v(v))
    table = _factor_table(f, v)
    pinned = None
    if active and f.total_degree() == -len(active):
        pinned = active[-1]
    grid_vars = [i for i in active if i != pinned]
    for offset in (0.0, 0.5):
        try:
            return _trapezoid(f, scalar, table, grid_vars, spec.grid_n, offset)
        except NearSingularError:
            continue
    raise NearSingularError("both the grid and the half-step shifted grid hit a pole")


def _trapezoid(f, scalar, table, grid_vars, n, offset) -> complex:
    nv = len(f.prefactor)
    circle = np.exp(2j * np.pi * (np.arange(n) + offset) / n)
    eps = np.finfo(float).eps
    if not grid_vars:
        zs = [np.complex128(1)] * nv
        val = complex(_chunk_values(scalar, f.prefactor, table, zs).reshape(-1)[0])
        return QuadratureResult(val, ROUNDOFF_ULPS * eps * abs(val), 1)
    re_parts: list[float] = []
    im_parts: list[float] = []
    abs_parts: list[float] = []
    inner = grid_vars[1:]
    inner_grid = np.meshgrid(*([circle] * len(inner)), indexing="ij") if inner else []
    inner_grid = [g.reshape(-1) for g in inner_grid]
    for z_outer in circle:
        zs: list = [np.complex128(1)] * nv
        zs[grid_vars[0]] = np.complex128(z_outer)
        for var, g in zip(inner, inner_grid):
            zs[var] = g
        val = np.atleast_1d(_chunk_values(scalar, f.prefactor, table, zs))
        re_parts.append(math.fsum(val.real.tolist()))
        im_parts.append(math.fsum(val.imag.tolist()))
        abs_parts.append(float(np.sum(np.abs(val))))
    count = n ** len(grid_vars)
    value = complex(math.fsum(re_parts) / count, math.fsum(im_parts) / count)
    return QuadratureResult(value, ROUNDOFF_ULPS * eps * math.fsum(abs_parts) / count, count)


# ---------------------------------------------------------------------------
# comparison against exact values


def exact_at(value: RatFunc, q0) -> mpmath.mpc:
    """value at v = +sqrt(q0), in mpmath at EXACT_DIGITS digits."""
    with mpmath.workdps(EXACT_DIGITS):
        v = mpmath.sqrt(mpmath.mpf(Fraction(q0).numerator) / Fraction(q0).denominator)

        def poly(p):
            acc = mpmath.mpc(0)
            for e, c in p.terms():
                acc += _mp_coeff(c) * v**e
            return acc

        return poly(value.num) / poly(value.den)


def _mp_coeff(c):
    if isinstance(c, CycRational):
        return mpmath.mpc(_coeff_complex(c))
    c = Fraction(c)
    return mpmath.mpf(c.numerator) / c.denominator


def abs_error(value: RatFunc, approx: complex, q0) -> float:
    with mpmath.workdps(EXACT_DIGITS):
        return float(abs(exact_at(value, q0) - mpmath.mpc(approx)))


def rel_error(value: RatFunc, approx: complex, q0, floor: float = 1e-300) -> float:
    with mpmath.workdps(EXACT_DIGITS):
        ref = exact_at(value, q0)
        return float(abs(ref - mpmath.mpc(approx)) / max(abs(ref), floor))


@dataclass(frozen=True)
class CompareEntry:
    q0: float
    exact: complex
    approx: complex
    rel_error: float
    refinement: tuple[tuple[int, float, float], ...] = ()

    def refinement_decreases(self) -> bool:
        """Each refined error is at most the coarser one, or already at its roundoff floor."""
        return refinement_decreases(self.refinement)


def refinement_decreases(steps) -> bool:
    """steps: (grid, error, roundoff floor) in increasing grid order."""
    return all(fine <= max(coarse, floor) for (_, coarse, _), (_, fine, floor) in zip(steps, steps[1:]))


def refinement_steps(exact: RatFunc, f: Integrand, q0, grids: Sequence[int]) -> tuple:
    out = []
    for n in grids:
        res = quadrature_result(f, QuadratureSpec(q0, n))
        out.append((n, abs_error(exact, res.value, q0), res.roundoff))
    return tuple(out)


@dataclass(frozen=True)
class CompareReport:
    tol: float
    entries: tuple[CompareEntry, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(e.rel_error <= self.tol for e in self.entries)

    @property
    def max_rel_error(self) -> float:
        return max((e.rel_error for e in self.entries), default=0.0)

    def to_json(self) -> dict:
        return {
            "tol": self.tol,
            "passed": self.passed,
            "max_rel_error": self.max_rel_error,
            "entries": [
                {
                    "q": e.q0,
                    "exact": [e.exact.real, e.exact.imag],
                    "quadrature": [e.approx.real, e.approx.imag],
                    "rel_error": e.rel_error,
                    "refinement": [{"grid": n, "abs_error": err, "roundoff": fl} for n, err, fl in e.refinement],
                }
                for e in self.entries
            ],
        }


def compare(
    exact: RatFunc,
    f: Integrand,
    qs: Sequence[float],
    tol: float,
    grid_n: int = 1024,
    refine: Sequence[int] = (64, 128, 256),
) -> CompareReport:
    """Relative error of the quadrature of f against exact at each q, with refinement pairs.

    >>> from iwahori_plancherel.gln import LeviSpec, density_integrand
    >>> compare(RatFunc.const(2) / (1 + RatFunc.q()), density_integrand(LeviSpec((1, 1))), [2], 1e-9).passed
    True
    """
    if not qs:
        raise ValueError("need at least one q value")
    entries = []
    for q0 in qs:
        approx = quadrature(f, QuadratureSpec(q0, grid_n))
        ref = exact_at(exact, q0)
        err = rel_error(exact, approx, q0, floor=1e-30)
        if exact.is_zero():
            err = abs(approx)
        steps = refinement_steps(exact, f, q0, refine)
        entries.append(CompareEntry(q0, complex(ref), approx, err, steps))
    return CompareReport(tol, tuple(entries))
