"""Torus integrands: scalar * z^prefactor * prod (z^left - c z^right)^power.

Monomials are integer tuples indexed by *all* torus variables of the original
problem; a variable that has been eliminated simply has exponent zero
everywhere and is absent from ``Integrand.active``.  Variables are 0-based in
code and 1-based (``z1``, ``z2``, ...) in the text format.

No measure is stored: :func:`iwahori_plancherel.residue.integrate_torus`
integrates against plain ``dz``, so a density meant for ``dz/z`` carries its
``1/z`` in the prefactor.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .qfield import ONE, ZERO, RatFunc, is_unit_modulus, parse_ratfunc

Monomial = tuple[int, ...]


class SubstituteIntoPoleError(ArithmeticError):
    """Substitution made a factor with negative power vanish identically."""


class ContourPoleError(ArithmeticError):
    """A pole lies on the unit circle (|location| = 1 for large q)."""


class UnsupportedPoleError(NotImplementedError):
    """An inside pole of a factor that is not linear in the eliminated variable."""


def madd(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def msub(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mscale(a: Monomial, k: int) -> Monomial:
    return tuple(k * x for x in a)


def unit(n: int) -> Monomial:
    return (0,) * n


def basis(n: int, i: int, e: int = 1) -> Monomial:
    out = [0] * n
    out[i] = e
    return tuple(out)


@dataclass(frozen=True)
class LinearFactor:
    """(z^left - coeff * z^right)^power in canonical orientation."""

    left: Monomial
    right: Monomial
    coeff: RatFunc
    power: int

    @property
    def key(self):
        return (self.left, self.right, self.coeff)

    def involves(self, var: int) -> bool:
        return bool(self.left[var] or self.right[var])

    def with_power(self, power: int) -> "LinearFactor":
        return LinearFactor(self.left, self.right, self.coeff, power)

    def degree(self) -> int | None:
        """Total degree of the base when homogeneous, else None."""
        dl, dr = sum(self.left), sum(self.right)
        return dl if dl == dr else None


def _canonical_factor(left: Monomial, right: Monomial, coeff: RatFunc, power: int):
    """Normalize one raw factor.

    Returns (scalar, monomial shift, factor or None); the factor is None when
    the base turned out to be a constant or a monomial.
    """
    if power == 0:
        return ONE, unit(len(left)), None
    if coeff.is_zero():
        return ONE, mscale(left, power), None
    common = tuple(min(a, b) for a, b in zip(left, right))
    left, right = msub(left, common), msub(right, common)
    shift = mscale(common, power)
    if left == right:
        base = ONE - coeff
        if base.is_zero():
            if power < 0:
                raise SubstituteIntoPoleError("factor with negative power vanishes identically")
            return ZERO, shift, None
        return base**power, shift, None
    scalar = ONE
    if left < right:
        # z^a - c z^b = (-c)(z^b - c^-1 z^a)
        scalar = (-coeff) ** power
        left, right, coeff = right, left, coeff.inverse()
    return scalar, shift, LinearFactor(left, right, coeff, power)


@dataclass(frozen=True)
class PoleLocation:
    """A pole of an integrand in one variable.

    ``kind`` is ``"zero"`` for z_var = 0 or ``"linear"`` for
    z_var = coeff * z^target.
    """

    var: int
    kind: str
    order: int
    coeff: RatFunc | None = None
    target: Monomial | None = None

    def describe(self) -> str:
        name = "z%d" % (self.var + 1)
        if self.kind == "zero":
            return "%s=0" % name
        mono = monomial_text(self.target)
        c = self.coeff.to_text()
        rhs = "[%s]" % c if mono == "1" else ("%s" % mono if self.coeff == ONE else "[%s] %s" % (c, mono))
        return "%s=%s" % (name, rhs)


@dataclass(frozen=True, eq=False)
class Integrand:
    scalar: RatFunc
    prefactor: Monomial
    factors: tuple[LinearFactor, ...]
    active: tuple[int, ...]

    # -- construction -----------------------------------------------------------
    @classmethod
    def build(
        cls,
        scalar: RatFunc,
        prefactor: Monomial,
        raw_factors: Iterable[tuple[Monomial, Monomial, RatFunc, int]] = (),
        active: Iterable[int] | None = None,
    ) -> "Integrand":
        """Canonicalize raw factors, pull constants into the scalar and merge equal factors."""
        n = len(prefactor)
        active = tuple(sorted(range(n) if active is None else set(active)))
        merged: dict = {}
        pre = tuple(prefactor)
        for left, right, coeff, power in raw_factors:
            s, shift, fac = _canonical_factor(tuple(left), tuple(right), coeff, power)
            if s.is_zero():
                return cls.zero(n, active)
            scalar = scalar * s
            pre = madd(pre, shift)
            if fac is not None:
                merged[fac.key] = merged.get(fac.key, 0) + fac.power
        if scalar.is_zero():
            return cls.zero(n, active)
        factors = tuple(
            LinearFactor(l, r, c, p)
            for (l, r, c), p in sorted(merged.items(), key=lambda kv: (kv[0][0], kv[0][1], hash(kv[0][2])))
            if p != 0
        )
        return cls(scalar, pre, factors, active)

    @classmethod
    def zero(cls, n: int, active: Iterable[int] | None = None) -> "Integrand":
        active = tuple(sorted(range(n) if active is None else set(active)))
        return cls(ZERO, unit(n), (), active)

    @classmethod
    def one(cls, n: int) -> "Integrand":
        return cls(ONE, unit(n), (), tuple(range(n)))

    def raw(self) -> list:
        return [(f.left, f.right, f.coeff, f.power) for f in self.factors]

    def rebuild(self, scalar=None, prefactor=None, raw_factors=None, active=None) -> "Integrand":
        return Integrand.build(
            self.scalar if scalar is None else scalar,
            self.prefactor if prefactor is None else prefactor,
            self.raw() if raw_factors is None else raw_factors,
            self.active if active is None else active,
        )

    # -- queries ------------------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.prefactor)

    def is_zero(self) -> bool:
        return self.scalar.is_zero()

    def involves(self, var: int) -> bool:
        return bool(self.prefactor[var]) or any(f.involves(var) for f in self.factors)

    def total_degree(self) -> int | None:
        """Total z-degree when homogeneous, else None."""
        deg = sum(self.prefactor)
        for f in self.factors:
            d = f.degree()
            if d is None:
                return None
            deg += d * f.power
        return deg

    def times_monomial(self, e: Sequence[int]) -> "Integrand":
        return Integrand(self.scalar, madd(self.prefactor, tuple(e)), self.factors, self.active)

    def times_scalar(self, c: RatFunc) -> "Integrand":
        if c.is_zero():
            return Integrand.zero(self.nvars, self.active)
        return Integrand(self.scalar * c, self.prefactor, self.factors, self.active)

    def canonical(self) -> "Integrand":
        return self.rebuild()

    # -- equality ---------------------------------------------------------------------
    def _ident(self):
        return (self.scalar, self.prefactor, frozenset((f.key, f.power) for f in self.factors), self.active)

    def __eq__(self, other):
        return isinstance(other, Integrand) and self._ident() == other._ident()

    def __hash__(self):
        return hash(self._ident())

    def shape(self):
        """Everything except the scalar; integrands of equal shape can be added."""
        return (self.prefactor, frozenset((f.key, f.power) for f in self.factors), self.active)

    # -- numerics -----------------------------------------------------------------------
    def evaluate(self, point: Sequence[complex], v) -> complex:
        """Complex value at ``point`` (one entry per variable) with v = q^(1/2) given."""
        val = complex(self.scalar.at_v(v))
        val *= _mono_value(self.prefactor, point)
        for f in self.factors:
            base = _mono_value(f.left, point) - complex(f.coeff.at_v(v)) * _mono_value(f.right, point)
            val *= base**f.power
        return val

    def __str__(self):
        return integrand_text(self)

    def __repr__(self):
        return "Integrand(%s)" % integrand_text(self)


def _mono_value(m: Monomial, point) -> complex:
    out = 1 + 0j
    for e, z in zip(m, point):
        if e:
            out *= complex(z) ** e
    return out


def collect(terms: Iterable[Integrand]) -> list[Integrand]:
    """Merge integrands with the same shape by adding scalars; drop zeros."""
    groups: dict = {}
    order = []
    for t in terms:
        if t.is_zero():
            continue
        key = t.shape()
        if key in groups:
            groups[key] = Integrand(groups[key].scalar + t.scalar, t.prefactor, t.factors, t.active)
        else:
            groups[key] = t
            order.append(key)
    return [groups[k] for k in order if not groups[k].is_zero()]


# ---------------------------------------------------------------------------
# substitution and differentiation


def substitute(f: Integrand, var: int, coeff: RatFunc, target: Monomial) -> Integrand:
    """Replace z_var by coeff * z^target and drop var from the active set."""
    if target[var]:
        raise ValueError("substitution target involves the substituted variable")
    if coeff.is_zero():
        raise ValueError("substitution coefficient must be nonzero")
    active = tuple(i for i in f.active if i != var)
    if f.is_zero():
        return Integrand.zero(f.nvars, active)

    def image(m: Monomial):
        e = m[var]
        if not e:
            return ONE, m
        out = list(madd(m, mscale(target, e)))
        out[var] = 0
        return coeff**e, tuple(out)

    scalar = f.scalar
    s, pre = image(f.prefactor)
    scalar = scalar * s
    raw = []
    for fac in f.factors:
        sl, left = image(fac.left)
        sr, right = image(fac.right)
        # sl z^left - c sr z^right = sl (z^left - (c sr / sl) z^right)
        scalar = scalar * sl**fac.power
        raw.append((left, right, fac.coeff * sr / sl, fac.power))
    return Integrand.build(scalar, pre, raw, active)


def derivative(f: Integrand, var: int) -> list[Integrand]:
    """Product-rule derivative with respect to z_var as a list of summands."""
    if f.is_zero():
        return []
    n = f.nvars
    ev = basis(n, var)
    out = []
    p = f.prefactor[var]
    if p:
        out.append(Integrand.build(f.scalar * p, msub(f.prefactor, ev), f.raw(), f.active))
    for idx, fac in enumerate(f.factors):
        a_left, a_right = fac.left[var], fac.right[var]
        if not (a_left or a_right):
            continue
        rest = [x for j, x in enumerate(f.raw()) if j != idx]
        rest.append((fac.left, fac.right, fac.coeff, fac.power - 1))
        if a_left:
            scalar = f.scalar * (fac.power * a_left)
            mono = msub(fac.left, ev)
        else:
            scalar = f.scalar * (-fac.coeff) * (fac.power * a_right)
            mono = msub(fac.right, ev)
        out.append(Integrand.build(scalar, madd(f.prefactor, mono), rest, f.active))
    return collect(out)


# ---------------------------------------------------------------------------
# poles


def _root_of(fac: LinearFactor, var: int):
    """(exponent of var, root coefficient c, target) with z_var^a = c z^target."""
    if fac.left[var]:
        a = fac.left[var]
        rest = list(fac.left)
        rest[var] = 0
        return a, fac.coeff, msub(fac.right, tuple(rest))
    a = fac.right[var]
    rest = list(fac.right)
    rest[var] = 0
    return a, fac.coeff.inverse(), msub(fac.left, tuple(rest))


def _inside(c: RatFunc, where: str) -> bool:
    """Is |c| < 1 in the large-q regime?  Raises on unit modulus."""
    deg = c.v_degree()
    if deg != 0:
        return deg < 0
    lead = c.leading_ratio()
    if is_unit_modulus(lead):
        raise ContourPoleError("pole on the unit circle at %s" % where)
    return abs(complex(lead) if not isinstance(lead, Fraction) else float(lead)) < 1


def classify_poles(f: Integrand, var: int) -> list[PoleLocation]:
    """Poles of f in z_var strictly inside the unit circle (large-q semantics)."""
    if var not in f.active:
        raise ValueError("variable z%d is not active" % (var + 1))
    if f.is_zero():
        return []
    poles = []
    zero_order = -f.prefactor[var]
    if zero_order > 0:
        poles.append(PoleLocation(var, "zero", zero_order))
    linear: dict = {}
    order_keys = []
    for fac in f.factors:
        if not fac.involves(var):
            continue
        a, c, target = _root_of(fac, var)
        if a == 1:
            key = (c, target)
            if key not in linear:
                linear[key] = 0
                order_keys.append(key)
            linear[key] += -fac.power
        elif fac.power < 0:
            where = "z%d^%d = %s" % (var + 1, a, c.to_text())
            if _inside(c, where):
                raise UnsupportedPoleError("inside pole of a degree-%d factor (%s)" % (a, where))
    for key in order_keys:
        order = linear[key]
        if order <= 0:
            continue
        c, target = key
        where = "z%d = %s" % (var + 1, c.to_text())
        if _inside(c, where):
            poles.append(PoleLocation(var, "linear", order, c, target))
    return poles


def _binom(p: int, n: int) -> Fraction:
    out = Fraction(1)
    for i in range(n):
        out = out * (p - i) / (i + 1)
    return out


def series_coefficient(f: Integrand, var: int, n: int) -> list[Integrand]:
    """Coefficient of z_var^n in the Laurent expansion of f around z_var = 0.

    Every factor is regular and nonvanishing at z_var = 0, so each one is
    expanded as a binomial series; the result is a sum of integrands in the
    remaining variables.
    """
    if f.is_zero():
        return []
    need = n - f.prefactor[var]
    active = tuple(i for i in f.active if i != var)
    if need < 0:
        return []
    nv = f.nvars
    scalar = f.scalar
    pre = list(f.prefactor)
    pre[var] = 0
    pre = tuple(pre)
    keep = []
    series = []  # per factor: list of (x-degree, scalar, monomial)
    for fac in f.factors:
        if not fac.involves(var):
            keep.append((fac.left, fac.right, fac.coeff, fac.power))
            continue
        p = fac.power
        if fac.left[var]:
            a = fac.left[var]
            other = list(fac.left)
            other[var] = 0
            scalar = scalar * (-fac.coeff) ** p
            pre = madd(pre, mscale(fac.right, p))
            step_scalar = fac.coeff.inverse()
            step_mono = msub(tuple(other), fac.right)
        else:
            a = fac.right[var]
            other = list(fac.right)
            other[var] = 0
            pre = madd(pre, mscale(fac.left, p))
            step_scalar = fac.coeff
            step_mono = msub(tuple(other), fac.left)
        terms = []
        k = 0
        while a * k <= need:
            c = _binom(p, k)
            if c:
                terms.append((a * k, (-step_scalar) ** k * c, mscale(step_mono, k)))
            k += 1
        series.append(terms)
    # truncated product of the series, tracked as degree -> {monomial: scalar}
    acc: dict[int, dict[Monomial, RatFunc]] = {0: {unit(nv): ONE}}
    for terms in series:
        nxt: dict[int, dict[Monomial, RatFunc]] = {}
        for d0, bucket in acc.items():
            for d1, c1, m1 in terms:
                d = d0 + d1
                if d > need:
                    continue
                slot = nxt.setdefault(d, {})
                for m0, c0 in bucket.items():
                    m = madd(m0, m1)
                    slot[m] = slot.get(m, ZERO) + c0 * c1
        acc = nxt
    out = []
    for mono, c in acc.get(need, {}).items():
        if not c.is_zero():
            out.append(Integrand.build(scalar * c, madd(pre, mono), keep, active))
    return collect(out)


def _deflate(f: Integrand, at: PoleLocation):
    """Remove the factors vanishing at a linear pole, leaving their unit-slope remainders."""
    var = at.var
    scalar = f.scalar
    pre = f.prefactor
    raw = []
    for fac in f.factors:
        if fac.involves(var):
            a, c, target = _root_of(fac, var)
            if a == 1 and c == at.coeff and target == at.target:
                # fac = K * (z_var - c z^target)
                if fac.left[var]:
                    other = list(fac.left)
                    other[var] = 0
                    pre = madd(pre, mscale(tuple(other), fac.power))
                else:
                    other = list(fac.right)
                    other[var] = 0
                    scalar = scalar * (-fac.coeff) ** fac.power
                    pre = madd(pre, mscale(tuple(other), fac.power))
                continue
        raw.append((fac.left, fac.right, fac.coeff, fac.power))
    return Integrand.build(scalar, pre, raw, f.active)


def residue_simple(f: Integrand, var: int, at: PoleLocation) -> Integrand:
    """Residue at a simple pole."""
    if at.order != 1:
        raise ValueError("residue_simple needs a simple pole (order %d given)" % at.order)
    if at.kind == "zero":
        terms = series_coefficient(f, var, -1)
        if not terms:
            return Integrand.zero(f.nvars, [i for i in f.active if i != var])
        if len(terms) != 1:
            raise AssertionError("simple zero pole produced several terms")
        return terms[0]
    return substitute(_deflate(f, at), var, at.coeff, at.target)


def residue_higher(f: Integrand, var: int, at: PoleLocation, order: int | None = None) -> list[Integrand]:
    """Residue at a pole of order >= 2, as a sum of integrands."""
    order = at.order if order is None else order
    if order < 2:
        raise ValueError("residue_higher needs order >= 2")
    if at.kind == "zero":
        return series_coefficient(f, var, -1)
    terms = [_deflate(f, at)]
    for _ in range(order - 1):
        terms = collect(t for g in terms for t in derivative(g, var))
    scale = RatFunc.const(Fraction(1, math.factorial(order - 1)))
    return collect(substitute(t, var, at.coeff, at.target).times_scalar(scale) for t in terms)


def residue(f: Integrand, at: PoleLocation) -> list[Integrand]:
    """Residue at any inside pole, as a list of summands."""
    if at.order == 1:
        r = residue_simple(f, at.var, at)
        return [] if r.is_zero() else [r]
    return residue_higher(f, at.var, at)


# ---------------------------------------------------------------------------
# text format


def monomial_text(m: Monomial) -> str:
    parts = []
    for i, e in enumerate(m):
        if e == 1:
            parts.append("z%d" % (i + 1))
        elif e:
            parts.append("z%d^%d" % (i + 1, e))
    return " ".join(parts) if parts else "1"


def integrand_text(f: Integrand) -> str:
    """Render as ``[scalar] * z1^-1 z2^-1 * (z1 - [q^-1] z2)^-1 * ...``."""
    pieces = ["[%s]" % f.scalar.to_text()]
    if any(f.prefactor):
        pieces.append(monomial_text(f.prefactor))
    for fac in f.factors:
        right = monomial_text(fac.right)
        if fac.coeff == ONE:
            rhs = right
        elif right == "1":
            rhs = "[%s]" % fac.coeff.to_text()
        else:
            rhs = "[%s] %s" % (fac.coeff.to_text(), right)
        body = "(%s - %s)" % (monomial_text(fac.left), rhs)
        pieces.append(body if fac.power == 1 else "%s^%d" % (body, fac.power))
    return " * ".join(pieces)


def _split_top(text: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [p.strip() for p in out]


_VAR = re.compile(r"z(\d+)(?:\^(-?\d+))?$")


def _parse_monomial(text: str, n: int) -> Monomial:
    out = [0] * n
    text = text.strip()
    if text in ("", "1"):
        return tuple(out)
    for tok in text.split():
        m = _VAR.match(tok)
        if not m:
            raise ValueError("bad monomial token %r" % tok)
        out[int(m.group(1)) - 1] += int(m.group(2) or 1)
    return tuple(out)


def _max_var(text: str) -> int:
    found = [int(x) for x in re.findall(r"z(\d+)", text)]
    return max(found) if found else 0


def parse_integrand(text: str, nvars: int | None = None) -> Integrand:
    """Inverse of :func:`integrand_text`; a leading scalar is optional."""
    n = nvars if nvars is not None else _max_var(text)
    scalar = ONE
    pre = unit(n)
    raw = []
    for piece in _split_top(text, "*"):
        if not piece:
            continue
        if piece.startswith("["):
            scalar = scalar * parse_ratfunc(piece[1 : _matching(piece, 0)])
            continue
        if piece.startswith("("):
            close = _matching(piece, 0)
            inner = piece[1:close]
            tail = piece[close + 1 :].strip()
            power = int(tail[1:].strip("() ")) if tail.startswith("^") else 1
            minus = _top_minus(inner)
            left = _parse_monomial(inner[:minus], n)
            rhs = inner[minus + 1 :].strip()
            coeff = ONE
            if rhs.startswith("["):
                end = _matching(rhs, 0)
                coeff = parse_ratfunc(rhs[1:end])
                rhs = rhs[end + 1 :]
            raw.append((left, _parse_monomial(rhs, n), coeff, power))
            continue
        pre = madd(pre, _parse_monomial(piece, n))
    return Integrand.build(scalar, pre, raw)


def _matching(text: str, start: int) -> int:
    depth = 0
    for i in range(start, len(text)):
        if text[i] in "([":
            depth += 1
        elif text[i] in ")]":
            depth -= 1
            if depth == 0:
                return i
    raise ValueError("unbalanced brackets in %r" % text)


def _top_minus(text: str) -> int:
    depth = 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "-" and depth == 0 and i > 0 and text[i - 1] == " ":
            return i
    raise ValueError("factor %r has no top-level ' - '" % text)
