"""Rank-2 Plancherel components (Sp4, G2) and a catalog of formal degrees.

Densities are one-variable integrands in z.  Component integrals are
(2 pi i)^-1 times the contour integral of density * trace * measure over
|z| = 1, where the measure is ``dz/z`` (default) or ``dz``.

Two G2 densities exist in two variants:

``printed``
    the factors exactly as they are usually displayed.
``corrected``
    the factors rederived from the Opdam product over the residual coset
    (numerator (z^3+q^(1/2))(z^3+q^(-1/2)) for M1, denominator factor
    (z+q^(-1/2)) for M2).  Only these give zeta-free values whose
    denominators divide a power of P_G2.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Mapping, Union

from .integrand import Integrand, integrand_text, parse_integrand
from .qfield import (
    ONE,
    ZERO,
    LaurentPoly,
    RatFunc,
    cyclotomic_factorization,
    divides_power_of,
    zeta,
)
from .residue import integrate_torus
from .weyl import exponents, poincare

Trace = Union[int, Mapping[int, object], Iterable]


class ZetaResidueError(ArithmeticError):
    """A component integral kept irrational cyclotomic coefficients."""


def _v(k: int, c=1) -> RatFunc:
    return RatFunc.monomial(k, c)


def _lin(root: RatFunc, power: int = 1):
    """Raw factor (z - root)^power."""
    return ((1,), (0,), root, power)


@dataclass(frozen=True)
class DensityEntry:
    group: str
    levi_label: str
    prefactor: RatFunc
    integrand: Integrand
    notes: str = ""
    variant: str = "printed"
    multipliers: tuple[str, ...] = ()

    @property
    def key(self) -> str:
        return "%s.%s" % (self.group, self.levi_label)

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "levi_label": self.levi_label,
            "variant": self.variant,
            "prefactor": self.prefactor.to_text(),
            "integrand": integrand_text(self.integrand),
            "multipliers": list(self.multipliers),
            "notes": self.notes,
        }


def _sp4_densities() -> list[DensityEntry]:
    q = RatFunc.q()
    mh = Integrand.build(
        _v(6),
        (0,),
        [_lin(q), _lin(q.inverse()), _lin(q**-2, -1), _lin(q**2, -1)],
    )
    ms = Integrand.build(
        ONE,
        (0,),
        [
            ((2,), (0,), ONE, 2),  # (z^2 - 1)^2
            _lin(_v(-1, -1), -1),
            _lin(_v(-3), -1),
            _lin(_v(3), -1),
            _lin(_v(1, -1), -1),
        ],
    )
    return [
        DensityEntry(
            "Sp4",
            "Mh",
            (q - 1) / (q + 1),
            mh,
            "GL1 x Sp2 Levi; density q^3(z-q)(z-q^-1)/((z-q^-2)(z-q^2))",
            multipliers=("c(G/P_h)^-2", "gamma(G/P_h)", "1/#W(M_h)"),
        ),
        DensityEntry(
            "Sp4",
            "Ms",
            (q - 1) / ((q + 1) * 2),
            ms,
            "GL2 Levi; density (z^2-1)^2/((z+q^-1/2)(z-q^-3/2)(z-q^3/2)(z+q^1/2))",
            multipliers=("c(G/P_s)^-2", "gamma(G/P_s)", "1/#W(M_s)"),
        ),
    ]


def _g2_densities() -> list[DensityEntry]:
    q = RatFunc.q()
    zeta3 = RatFunc.const(_third_root())
    prefactor = (q - 1) / (q**5 * (q + 1) * 2)
    # (z + zeta^k q^(+-1/2)) for k = 0, 1, 2 covers z^3 + q^(+-3/2)
    cube_roots_den = []
    for s in (1, -1):
        for k in range(3):
            cube_roots_den.append(_lin(-(zeta3**k) * _v(s), -1))
    m1_den = [_lin(_v(-3, -1), -1), _lin(_v(3, -1), -1), _lin(_v(-1), -1), _lin(_v(1), -1)] + cube_roots_den
    # (z+1)^2 (z-1)^2; the three factors z+q^(-1/2) are already among the cube roots
    m1_common = [_lin(-ONE, 2), _lin(ONE, 2)]
    m1_printed = Integrand.build(_v(21), (0,), [((3,), (0,), -(q.inverse()), 2)] + m1_common + m1_den)
    m1_fixed = Integrand.build(
        _v(21),
        (0,),
        [((3,), (0,), _v(1, -1), 1), ((3,), (0,), _v(-1, -1), 1)] + m1_common + m1_den,
    )
    m2_num = [((2,), (0,), ONE, 2), _lin(_v(3, -1)), _lin(_v(-3, -1))]
    m2_tail = [_lin(_v(-1), -1), _lin(_v(-5, -1), -1), ((2,), (0,), q, -1), _lin(_v(5, -1), -1)]
    m2_printed = Integrand.build(_v(10), (0,), m2_num + m2_tail + [_lin(_v(1, -1), -1)])
    m2_fixed = Integrand.build(_v(10), (0,), m2_num + m2_tail + [_lin(_v(-1, -1), -1)])
    mult = ("c(G/P)^-2 gamma(G/P) beyond the printed prefactor",)
    return [
        DensityEntry("G2", "M1", prefactor, m1_fixed, "Steinberg of M1 = GL2; numerator (z^3+q^1/2)(z^3+q^-1/2)", "corrected", mult),
        DensityEntry("G2", "M1", prefactor, m1_printed, "as displayed; numerator (z^3+q^-1)^2", "printed", mult),
        DensityEntry("G2", "M2", prefactor, m2_fixed, "Steinberg of M2 = GL2; denominator factor (z+q^-1/2)", "corrected", mult),
        DensityEntry("G2", "M2", prefactor, m2_printed, "as displayed; denominator factor (z+q^1/2)", "printed", mult),
    ]


def _third_root():
    """exp(2 pi i / 3) in the configured cyclotomic field."""
    from .qfield import ZETA_ORDER

    if ZETA_ORDER % 3:
        raise ValueError("G2 densities need a cyclotomic order divisible by 3")
    return zeta(ZETA_ORDER // 3)


def densities() -> list[DensityEntry]:
    return _sp4_densities() + _g2_densities()


def density(group: str, levi_label: str, variant: str = "corrected") -> DensityEntry:
    for d in densities():
        if d.group == group and d.levi_label == levi_label:
            if d.group == "Sp4" or d.variant == variant:
                return d
    raise KeyError("no density %s.%s (%s)" % (group, levi_label, variant))


# ---------------------------------------------------------------------------
# component integrals


def _trace_terms(trace: Trace) -> dict[int, RatFunc]:
    if isinstance(trace, int):
        return {trace: ONE}
    items = trace.items() if isinstance(trace, Mapping) else trace
    out: dict[int, RatFunc] = {}
    for e, c in items:
        c = c if isinstance(c, RatFunc) else RatFunc.const(c)
        out[int(e)] = out.get(int(e), ZERO) + c
    return {e: c for e, c in out.items() if not c.is_zero()}


def component_integral(entry: DensityEntry, trace: Trace, measure: str = "dz/z") -> RatFunc:
    """(2 pi i)^-1 times the integral of density * trace over |z| = 1 (prefactor excluded)."""
    if measure not in ("dz/z", "dz"):
        raise ValueError("measure must be 'dz/z' or 'dz'")
    shift = -1 if measure == "dz/z" else 0
    total = ZERO
    for e, c in sorted(_trace_terms(trace).items()):
        term = entry.integrand.times_monomial((e + shift,))
        total = total + c * integrate_torus(term)
    return total


def sp4_component_integral(levi_label: str, trace: Trace, measure: str = "dz/z") -> RatFunc:
    """Sp4 component integral without the prefactor and the symbolic multipliers."""
    if levi_label not in ("Mh", "Ms"):
        raise KeyError("Sp4 components are Mh and Ms")
    return component_integral(density("Sp4", levi_label), trace, measure)


def g2_component_integral(
    levi_label: str,
    trace: Trace,
    variant: str = "corrected",
    with_prefactor: bool = True,
    measure: str = "dz/z",
) -> RatFunc:
    """G2 component integral, by default including the prefactor (q-1)/(2q^5(q+1))."""
    if levi_label not in ("M1", "M2"):
        raise KeyError("G2 components are M1 and M2")
    entry = density("G2", levi_label, variant)
    value = component_integral(entry, trace, measure)
    if not value.is_zeta_free():
        raise ZetaResidueError("G2 %s integral kept zeta coefficients: %s" % (levi_label, value))
    return entry.prefactor * value if with_prefactor else value


def integer_coefficients(value: RatFunc) -> bool:
    """Zeta-free with integer numerator and denominator in canonical form."""
    if not value.is_zeta_free():
        return False
    return all(Fraction(c).denominator == 1 for p in (value.num, value.den) for c in p.coeffs)


# the in-proof closed forms, as displayed


def sp4_mh_displayed(e: int) -> RatFunc:
    """q^{-2e-2}(q^{-2}-q)/(1+q+q^2+q^3)."""
    q = RatFunc.q()
    return q ** (-2 * e - 2) * (q**-2 - q) / (1 + q + q**2 + q**3)


def sp4_ms_displayed(e: int) -> RatFunc:
    """q^-3 q^{9/2} q^{-3e/2}/((1+q)(1+q^2)) + q^e q^{1/2}/(1+q)^2."""
    q = RatFunc.q()
    return _v(-6 + 9 - 3 * e) / ((1 + q) * (1 + q**2)) + q**e * _v(1) / (1 + q) ** 2


def sp4_ms_residue_form(e: int) -> RatFunc:
    """Sum of the residues of the Ms integrand times z^e dz at q^{-3/2} and -q^{-1/2}.

    Equals the plain-dz integral up to a Laurent polynomial (the z = 0 part).
    """
    q = RatFunc.q()
    den = (1 + q) * (1 + q**2)
    at_three_halves = _v(-3) * (1 - q**3) * _v(-3 * e) / den
    sign = 1 if e % 2 else -1
    at_half = sign * (1 - q) * _v(1) * _v(-e) / den
    return at_three_halves + at_half


# ---------------------------------------------------------------------------
# formal degrees


@dataclass(frozen=True)
class FormalDegreeEntry:
    label: str
    value: RatFunc
    weyl_type: str | None = None
    source: str = ""
    notes: str = ""

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "value": self.value.to_json(),
            "text": self.value.to_text(),
            "weyl_type": self.weyl_type,
            "source": self.source,
            "notes": self.notes,
        }

    @classmethod
    def from_json(cls, data: dict) -> "FormalDegreeEntry":
        return cls(data["label"], RatFunc.from_json(data["value"]), data.get("weyl_type"), data.get("source", ""), data.get("notes", ""))


def _qm(k: int) -> RatFunc:
    return RatFunc.q() ** k


def _borel_c(ell: int, variant: str) -> RatFunc:
    out = ONE
    for i in range(ell):
        if variant == "a":
            num = (1 - _qm(-1)) * (1 - _qm(-ell - i + 1))
            den = (1 - _qm(-i - 1)) * (1 + _qm(-i - 1)) * (1 + _qm(-i + 1))
        else:
            num = (1 - _qm(-1)) * (1 + _qm(-ell - i + 3))
            den = (1 - _qm(-i - 1)) * (1 + _qm(-i + 1)) ** 2
        out = out * num / den
    return out


def _borel_b(ell: int) -> RatFunc:
    """The type B_ell expression with the sign taken as +."""
    q = RatFunc.q()
    out = _qm(ell) * (1 + _qm(ell)) * (1 - _qm(2 - ell)) * (1 - _qm(3 - ell))
    out = out / ((1 + q) * RatFunc.from_poly(_qint(2 * ell)))
    for i in range(1, ell):
        out = out * _qm(2 * i - 1) / RatFunc.from_poly(_qint(2 * i))
    for i in range(2, ell):
        out = out * _qm(2 * i - 2) * (1 - _qm(1 - ell)) * (1 - _qm(2 - ell + i)) / (1 - _qm(2 * i - 2))
    return out


def _qint(n: int) -> LaurentPoly:
    from .qfield import q_integer

    return q_integer(n)


def steinberg(cartan: str) -> RatFunc:
    """prod (1 - q^{e_i}) / P_W(q)."""
    num = ONE
    for e in exponents(cartan):
        num = num * (1 - _qm(e))
    return num / RatFunc.from_poly(poincare(cartan))


def build_formal_degree_catalog() -> list[FormalDegreeEntry]:
    """Constructors for every catalog entry, in catalog order."""
    q = RatFunc.q()
    P = lambda n: RatFunc.from_poly(_qint(n))
    c = RatFunc.const
    out = [
        FormalDegreeEntry("G2.tau1", (q**5 - 1) * (q - 1) ** 2 / ((q**6 - 1) * (q + 1)), "G2", "Reeder"),
        FormalDegreeEntry("G2.tau2", q * (1 + q**3) * (q - 1) ** 2 / (c(6) * P(6) * (1 + q) ** 2), "G2", "Reeder"),
        FormalDegreeEntry("G2.tau2prime", q * (1 + q**3) * (q - 1) ** 2 / (c(3) * P(6) * (1 + q) ** 2), "G2", "Reeder", "twice G2.tau2"),
        FormalDegreeEntry("G2.tau3", q * (q - 1) ** 2 * (1 + q + q**2) / (c(2) * P(6) * (1 + q)), "G2", "Reeder"),
        FormalDegreeEntry("G2.tau4", q * (q - 1) ** 2 * (q + 1) / (c(3) * (q**6 - 1)), "G2", "Reeder"),
        FormalDegreeEntry("SO5.tau2", q * (q - 1) ** 2 / (c(2) * (q**2 + 1) * (q + 1) ** 2), "B2", "Reeder"),
        FormalDegreeEntry("SO7.tau2", q * (q - 1) ** 3 / (c(4) * (q**2 + 1) * (q + 1) ** 3), "B3", "Reeder"),
        FormalDegreeEntry("SO7.tau3", q * (q - 1) ** 2 * (q**3 - 1) / (c(4) * (q**3 + 1) * (q**2 + 1) * (q + 1)), "B3", "Reeder"),
        FormalDegreeEntry(
            "SO9.tau1",
            (q**4 - 1) * (q**3 - 1) * (q**7 - 1) * (q**2 - 1) ** 2 * (q - 1) ** 2
            / (c(2) * (q**8 - 1) * (q**6 - 1) * (q**4 - 1) ** 2 * (q + 1) ** 3),
            "B4",
            "Reeder",
        ),
        FormalDegreeEntry("SO9.tau3", q * (q**5 - 1) * (q - 1) ** 3 / (c(4) * (q**4 + 1) * (q**3 + 1) * (q + 1) ** 3), "B4", "Reeder"),
        FormalDegreeEntry("SO9.tau5", q**2 * (q**3 - 1) ** 2 * (q - 1) ** 2 / (c(2) * (q**4 + 1) * (q**2 + 1) * (q + 1) ** 4), "B4", "Reeder"),
        FormalDegreeEntry(
            "F4.tau",
            q * (q**10 - 1) * (q**7 - 1) * (q**3 - 1) * (q - 1) ** 3 * (1 + q + q**2)
            / (c(2) * (q**12 - 1) * (q**8 - 1) * P(6) * (q + 1) ** 2),
            "F4",
            "Reeder",
        ),
    ]
    for ell in (2, 3, 4):
        out.append(FormalDegreeEntry("C%d.borel_a" % ell, _borel_c(ell, "a"), "C%d" % ell, "Borel"))
    out.append(FormalDegreeEntry("C4.borel_b", _borel_c(4, "b"), "C4", "Borel"))
    for ell in (3, 4):
        out.append(
            FormalDegreeEntry("B%d.borel" % ell, _borel_b(ell), "B%d" % ell, "Borel", "expression vanishes identically as printed")
        )
    for cartan in ("A1", "A2", "A3", "B2", "C2", "G2", "B3", "C3", "B4", "C4", "F4"):
        out.append(FormalDegreeEntry("Steinberg(%s)" % cartan, steinberg(cartan), cartan, "Steinberg"))
    return out


def data_path():
    return resources.files("iwahori_plancherel").joinpath("data/catalog.json")


def catalog_json() -> dict:
    return {
        "format": "RatFunc values are {num, den} lists of [v-exponent, [zeta coordinates]]; q = v^2",
        "formal_degrees": [e.to_json() for e in build_formal_degree_catalog()],
        "densities": [d.to_json() for d in densities()],
    }


def write_catalog(path=None) -> None:
    path = data_path() if path is None else path
    with open(path, "w") as fh:
        json.dump(catalog_json(), fh, indent=1)
        fh.write("\n")


_LOADED: dict | None = None


def load_catalog() -> dict[str, FormalDegreeEntry]:
    """Formal degrees from the shipped data file, keyed by label."""
    global _LOADED
    if _LOADED is None:
        data = json.loads(data_path().read_text())
        _LOADED = {d["label"]: FormalDegreeEntry.from_json(d) for d in data["formal_degrees"]}
    return _LOADED


def formal_degree(label: str) -> RatFunc:
    try:
        return load_catalog()[label].value
    except KeyError:
        raise KeyError("unknown formal degree label %r" % label) from None


@dataclass(frozen=True)
class PoleCheck:
    label: str
    ok: bool
    roots_of_unity: bool
    cyclotomic: dict = field(default_factory=dict)
    poincare_k: int | None = None
    weyl_type: str | None = None

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "ok": self.ok,
            "roots_of_unity": self.roots_of_unity,
            "denominator_factors": {"Phi%d(q)" % d: m for d, m in sorted(self.cyclotomic.items())},
            "weyl_type": self.weyl_type,
            "poincare_k": self.poincare_k,
        }


def _den_in_q(value: RatFunc) -> LaurentPoly:
    if any(e % 2 for e, _ in value.den.terms()):
        raise ValueError("denominator is not a polynomial in q")
    return LaurentPoly.from_dict({e // 2: c for e, c in value.den.terms()})


def check_formal_degree_poles(entry: Union[str, FormalDegreeEntry]) -> PoleCheck:
    """Denominator roots are roots of unity, and away from q = 1 it divides a power of P_W."""
    if isinstance(entry, str):
        if entry not in load_catalog():
            raise KeyError("unknown formal degree label %r" % entry)
        entry = load_catalog()[entry]
    value = entry.value
    den_q = _den_in_q(value)
    factors = cyclotomic_factorization(den_q)
    if factors is None:
        return PoleCheck(entry.label, False, False, {}, None, entry.weyl_type)
    k = 0
    if entry.weyl_type is not None:
        rest = value.den
        ones = factors.get(1, 0)
        phi1 = LaurentPoly.from_dict({0: -1, 2: 1})
        for _ in range(ones):
            rest = _exact_div(rest, phi1)
        k = divides_power_of(rest, poincare(entry.weyl_type))
    ok = k is not None
    return PoleCheck(entry.label, ok, True, factors, k, entry.weyl_type)


def _exact_div(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    from .qfield import _pdivmod

    quot, rem = _pdivmod(list(a.coeffs), list(b.coeffs))
    if rem:
        raise ArithmeticError("inexact division")
    return LaurentPoly(a.low - b.low, quot)
