"""Exact arithmetic in Laurent polynomials and rational functions of v = q^(1/2).

Coefficients live in the cyclotomic field Q(zeta_m).  Elements that happen to
be rational are always represented by plain :class:`fractions.Fraction`, so the
common zeta-free computations never touch the slower cyclotomic code path.
Genuinely irrational elements are :class:`CycRational` instances holding
coordinates in the power basis 1, zeta, ..., zeta^(phi(m)-1).

Every exponent is an integer power of ``v``; ``q`` itself is ``v**2``.

>>> q = RatFunc.q()
>>> ((1 / q - 1) ** 2 / (q ** -2 - 1)).to_text()
'(1-q)/(1+q)'
"""
from __future__ import annotations

import cmath
import math
import os
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Union

ZETA_ORDER = int(os.environ.get("IWAHORI_ZETA_ORDER", "12"))


class PoleError(ZeroDivisionError):
    """Raised when a rational function is evaluated at a zero of its denominator."""


# ---------------------------------------------------------------------------
# integer polynomial helpers (ascending coefficient lists)


def _int_poly_divexact(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(out) - 1, -1, -1):
        c, r = divmod(a[i + len(b) - 1], lead)
        if r:
            raise ArithmeticError("inexact integer polynomial division")
        out[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    if any(a[: len(b) - 1]):
        raise ArithmeticError("inexact integer polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(d: int) -> tuple[int, ...]:
    """Integer coefficients of the d-th cyclotomic polynomial, lowest degree first.

    >>> cyclotomic_poly(12)
    (1, 0, -1, 0, 1)
    """
    if d < 1:
        raise ValueError("cyclotomic index must be positive")
    poly = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            poly = _int_poly_divexact(poly, list(cyclotomic_poly(e)))
    return tuple(poly)


@lru_cache(maxsize=None)
def euler_phi(d: int) -> int:
    result, n, p = d, d, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


# ---------------------------------------------------------------------------
# the cyclotomic field


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[Fraction, ...], ...]:
    """Coordinates of zeta^k for k = 0..m-1, reduced modulo Phi_m."""
    phi = euler_phi(m)
    modulus = cyclotomic_poly(m)
    table = []
    current = [Fraction(0)] * phi
    current[0] = Fraction(1)
    for _ in range(m):
        table.append(tuple(current))
        # multiply by zeta and reduce x^phi = -(modulus[0] + ... )
        top = current[-1]
        current = [Fraction(0)] + current[:-1]
        if top:
            for i in range(phi):
                current[i] -= top * modulus[i]
    return tuple(table)


class CycRational:
    """An irrational element of Q(zeta_m) in power-basis coordinates.

    Construct through :func:`cyc` (or :func:`zeta`), which collapses rational
    values to :class:`Fraction`.  Instances are immutable.
    """

    __slots__ = ("m", "coords", "_hash")

    def __init__(self, m: int, coords: tuple[Fraction, ...]):
        self.m = m
        self.coords = coords
        self._hash = None

    # -- helpers --------------------------------------------------------
    def _coerce(self, other) -> tuple[Fraction, ...] | None:
        if isinstance(other, CycRational):
            if other.m != self.m:
                raise ValueError("mixing cyclotomic orders %d and %d" % (self.m, other.m))
            return other.coords
        if isinstance(other, (int, Fraction)):
            out = [Fraction(0)] * len(self.coords)
            out[0] = Fraction(other)
            return tuple(out)
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return cyc(self.m, tuple(a + b for a, b in zip(self.coords, c)))

    __radd__ = __add__

    def __neg__(self):
        return CycRational(self.m, tuple(-a for a in self.coords))

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return cyc(self.m, tuple(a - b for a, b in zip(self.coords, c)))

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return cyc(self.m, tuple(b - a for a, b in zip(self.coords, c)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Fraction(0)
            return CycRational(self.m, tuple(a * other for a in self.coords))
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        phi = len(self.coords)
        prod = [Fraction(0)] * (2 * phi - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(c):
                    if b:
                        prod[i + j] += a * b
        out = list(prod[:phi])
        table = _power_table(self.m)
        for k in range(phi, 2 * phi - 1):
            if prod[k]:
                row = table[k % self.m]
                for i in range(phi):
                    out[i] += prod[k] * row[i]
        return cyc(self.m, tuple(out))

    __rmul__ = __mul__

    def galois(self, a: int) -> Union[Fraction, "CycRational"]:
        """Image under the automorphism zeta -> zeta^a (a coprime to m)."""
        if math.gcd(a, self.m) != 1:
            raise ValueError("Galois exponent must be coprime to the order")
        table = _power_table(self.m)
        out = [Fraction(0)] * len(self.coords)
        for i, c in enumerate(self.coords):
            if c:
                row = table[(a * i) % self.m]
                for j in range(len(out)):
                    out[j] += c * row[j]
        return cyc(self.m, tuple(out))

    def conjugate(self):
        return self.galois(-1 % self.m)

    def norm(self) -> Fraction:
        result = self
        for a in range(2, self.m):
            if math.gcd(a, self.m) == 1:
                result = result * self.galois(a)
        if isinstance(result, CycRational):
            raise ArithmeticError("norm did not land in Q")
        return result

    def inverse(self):
        # x^-1 = (product of the other conjugates) / N(x)
        rest = Fraction(1)
        for a in range(2, self.m):
            if math.gcd(a, self.m) == 1:
                rest = rest * self.galois(a)
        n = self * rest
        if isinstance(n, CycRational):
            raise ArithmeticError("norm did not land in Q")
        return rest * (1 / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, CycRational):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * Fraction(other)
        return NotImplemented

    def __pow__(self, n: int):
        return _coeff_pow(self, n)

    def __eq__(self, other):
        if isinstance(other, CycRational):
            return self.m == other.m and self.coords == other.coords
        return False  # a CycRational is never rational

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.m, self.coords))
        return self._hash

    def __complex__(self):
        z = cmath.exp(2j * math.pi / self.m)
        return sum(float(c) * z**i for i, c in enumerate(self.coords))

    def __repr__(self):
        return "CycRational(%d, %s)" % (self.m, _coeff_text(self))


Coeff = Union[Fraction, CycRational]


def cyc(m: int, coords: Iterable) -> Coeff:
    """Build a field element from power-basis coordinates; rational values become Fraction."""
    coords = tuple(Fraction(c) for c in coords)
    phi = euler_phi(m)
    if len(coords) != phi:
        raise ValueError("expected %d coordinates for order %d" % (phi, m))
    if not any(coords[1:]):
        return coords[0]
    return CycRational(m, coords)


def zeta(k: int = 1, m: int | None = None) -> Coeff:
    """The root of unity exp(2*pi*i*k/m) as an exact field element."""
    m = ZETA_ORDER if m is None else m
    return cyc(m, _power_table(m)[k % m])


def _coeff_pow(c: Coeff, n: int) -> Coeff:
    if n < 0:
        c, n = 1 / c, -n
    result: Coeff = Fraction(1)
    base = c
    while n:
        if n & 1:
            result = result * base
        base = base * base
        n >>= 1
    return result


def _coeff_conjugate(c: Coeff) -> Coeff:
    return c.conjugate() if isinstance(c, CycRational) else c


def _coeff_complex(c: Coeff) -> complex:
    return complex(c) if isinstance(c, CycRational) else complex(float(c))


def _coeff_text(c: Coeff) -> str:
    if not isinstance(c, CycRational):
        return str(c)
    parts = []
    for i, a in enumerate(c.coords):
        if not a:
            continue
        if i == 0:
            body = str(abs(a))
        else:
            sym = "zeta" if i == 1 else "zeta^%d" % i
            body = sym if abs(a) == 1 else "%s*%s" % (abs(a), sym)
        sign = "-" if a < 0 else "+"
        parts.append((sign, body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += sign + body
    return text


def is_unit_modulus(c: Coeff) -> bool:
    """Exact test of |c| = 1."""
    return c * _coeff_conjugate(c) == 1


# ---------------------------------------------------------------------------
# dense polynomial helpers over the coefficient field (lowest degree first)


def _trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y != 0:
                out[i + j] += x * y
    return out


def _pdivmod(a: list, b: list) -> tuple[list, list]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    if len(a) < len(b):
        return [], a
    inv = 1 / b[-1]
    quot = [Fraction(0)] * (len(a) - len(b) + 1)
    nb = len(b)
    for i in range(len(quot) - 1, -1, -1):
        c = a[i + nb - 1]
        if c == 0:
            continue
        c = c * inv
        quot[i] = c
        for j in range(nb):
            if b[j] != 0:
                a[i + j] -= c * b[j]
    return _trim(quot), _trim(a[: nb - 1])


def _pgcd(a: list, b: list) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pdivmod(a, b)[1]
    if not a:
        return a
    inv = 1 / a[-1]
    return [c * inv for c in a]


# ---------------------------------------------------------------------------
# Laurent polynomials in v


class LaurentPoly:
    """Immutable Laurent polynomial sum_k c_k v^k stored densely from ``low``."""

    __slots__ = ("low", "coeffs", "_hash")

    def __init__(self, low: int = 0, coeffs: Iterable = ()):
        cs = [c if isinstance(c, CycRational) else Fraction(c) for c in coeffs]
        start = 0
        while start < len(cs) and cs[start] == 0:
            start += 1
        cs = _trim(cs[start:])
        self.low = low + start if cs else 0
        self.coeffs = tuple(cs)
        self._hash = None

    @classmethod
    def _raw(cls, low: int, coeffs: tuple) -> "LaurentPoly":
        obj = object.__new__(cls)
        obj.low, obj.coeffs, obj._hash = low, coeffs, None
        return obj

    @classmethod
    def from_dict(cls, terms: dict) -> "LaurentPoly":
        terms = {e: c for e, c in terms.items() if c != 0}
        if not terms:
            return cls()
        lo, hi = min(terms), max(terms)
        return cls(lo, [terms.get(e, 0) for e in range(lo, hi + 1)])

    @classmethod
    def monomial(cls, exp: int, coeff=1) -> "LaurentPoly":
        return cls(exp, [coeff])

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monomial(self) -> bool:
        return len(self.coeffs) == 1

    @property
    def high(self) -> int:
        return self.low + len(self.coeffs) - 1

    def degree(self) -> int:
        if not self.coeffs:
            raise ValueError("degree of zero polynomial")
        return self.high

    def span(self) -> int:
        """Degree after clearing the v-content."""
        return len(self.coeffs) - 1

    def leading(self) -> Coeff:
        return self.coeffs[-1]

    def trailing(self) -> Coeff:
        return self.coeffs[0]

    def terms(self) -> Iterator[tuple[int, Coeff]]:
        for i, c in enumerate(self.coeffs):
            if c != 0:
                yield self.low + i, c

    def coefficient(self, exp: int) -> Coeff:
        i = exp - self.low
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def is_zeta_free(self) -> bool:
        return not any(isinstance(c, CycRational) for c in self.coeffs)

    def shift(self, k: int) -> "LaurentPoly":
        if not self.coeffs:
            return self
        return LaurentPoly._raw(self.low + k, self.coeffs)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not self.coeffs:
            return other
        if not other.coeffs:
            return self
        lo = min(self.low, other.low)
        hi = max(self.high, other.high)
        out = [Fraction(0)] * (hi - lo + 1)
        for i, c in enumerate(self.coeffs):
            out[self.low - lo + i] = c
        for i, c in enumerate(other.coeffs):
            out[other.low - lo + i] += c
        return LaurentPoly(lo, out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw(self.low, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if not self.coeffs or not other.coeffs:
                return LaurentPoly()
            return LaurentPoly._raw(self.low + other.low, tuple(_pmul(list(self.coeffs), list(other.coeffs))))
        if other == 0:
            return LaurentPoly()
        return LaurentPoly._raw(self.low, tuple(c * other for c in self.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative power of a Laurent polynomial")
        result = LaurentPoly.monomial(0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def map_coeffs(self, fn) -> "LaurentPoly":
        return LaurentPoly(self.low, [fn(c) for c in self.coeffs])

    def evaluate(self, v):
        """Evaluate at ``v`` (Fraction for exact rational results, else complex)."""
        exact = isinstance(v, (int, Fraction)) and self.is_zeta_free()
        if exact:
            v = Fraction(v)
            if v == 0 and self.low < 0:
                raise PoleError("negative power of v at v = 0")
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * v + c
            return acc * v**self.low
        v = complex(v)
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * v + _coeff_complex(c)
        return acc * v**self.low

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.low == other.low and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.low, self.coeffs))
        return self._hash

    def __repr__(self):
        return "LaurentPoly(%s)" % _poly_text(self, "v", 1)


# ---------------------------------------------------------------------------
# rational functions


def _poly_text(p: LaurentPoly, var: str, step: int) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for e, c in p.terms():
        e //= step
        if e == 0:
            mono = ""
        elif e == 1:
            mono = var
        else:
            mono = "%s^%d" % (var, e)
        if isinstance(c, CycRational):
            body = "(%s)" % _coeff_text(c)
            sign = "+"
            text = body + ("*" + mono if mono else "")
        else:
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                text = str(a)
            elif a == 1:
                text = mono
            else:
                text = "%s*%s" % (a, mono)
        pieces.append((sign, text))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, text in pieces[1:]:
        out += sign + text
    return out


class RatFunc:
    """Canonical quotient of Laurent polynomials in v.

    The denominator has lowest exponent 0 and lowest coefficient 1, and is
    coprime to the numerator once v-powers are cleared, so equal values have
    identical representations.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None):
        if den is None:
            den = _ONE_POLY
        n, d = _canonical(num, den)
        self.num, self.den, self._hash = n, d, None

    @classmethod
    def _raw(cls, num: LaurentPoly, den: LaurentPoly) -> "RatFunc":
        obj = object.__new__(cls)
        obj.num, obj.den, obj._hash = num, den, None
        return obj

    # -- constructors ------------------------------------------------------
    @classmethod
    def const(cls, c) -> "RatFunc":
        if not isinstance(c, CycRational):
            c = Fraction(c)
        if c == 0:
            return ZERO
        return cls._raw(LaurentPoly._raw(0, (c,)), _ONE_POLY)

    @classmethod
    def v_power(cls, k: int, coeff=1) -> "RatFunc":
        return cls.monomial(k, coeff)

    @classmethod
    def monomial(cls, k: int, coeff=1) -> "RatFunc":
        if coeff == 0:
            return ZERO
        if not isinstance(coeff, CycRational):
            coeff = Fraction(coeff)
        return cls._raw(LaurentPoly._raw(k, (coeff,)), _ONE_POLY)

    @classmethod
    def q(cls) -> "RatFunc":
        return cls.monomial(2)

    @classmethod
    def v(cls) -> "RatFunc":
        return cls.monomial(1)

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> "RatFunc":
        return cls._raw(p, _ONE_POLY)

    # -- queries -------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_laurent(self) -> bool:
        """True when the value is a Laurent polynomial in v."""
        return self.den.is_monomial()

    def is_monomial(self) -> bool:
        return self.den.is_monomial() and self.num.is_monomial()

    def is_zeta_free(self) -> bool:
        return self.num.is_zeta_free() and self.den.is_zeta_free()

    def v_degree(self) -> int:
        """deg num - deg den: the growth exponent in v as v -> infinity."""
        return self.num.degree() - self.den.degree()

    def leading_ratio(self) -> Coeff:
        return self.num.leading() / self.den.leading()

    def as_constant(self) -> Coeff | None:
        if self.den.is_monomial() and self.num.is_monomial() and self.num.low == 0:
            return self.num.coeffs[0]
        if self.num.is_zero():
            return Fraction(0)
        return None

    # -- arithmetic ------------------------------------------------------------
    @staticmethod
    def _lift(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, LaurentPoly):
            return RatFunc.from_poly(x)
        if isinstance(x, (int, Fraction, CycRational)):
            return RatFunc.const(x)
        raise TypeError("cannot use %r as a rational function" % (x,))

    def __add__(self, other) -> "RatFunc":
        try:
            other = RatFunc._lift(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        a, b = self, other
        if a.den == b.den:
            return RatFunc(a.num + b.num, a.den)
        if a.den.is_monomial():  # den is exactly 1
            return RatFunc._raw_finish(a.num * b.den + b.num, b.den)
        if b.den.is_monomial():
            return RatFunc._raw_finish(a.num + b.num * a.den, a.den)
        g = _pgcd(list(a.den.coeffs), list(b.den.coeffs))
        if len(g) > 1:
            ad = _pdivmod(list(a.den.coeffs), g)[0]
            bd = _pdivmod(list(b.den.coeffs), g)[0]
        else:
            ad, bd = list(a.den.coeffs), list(b.den.coeffs)
        ad_p, bd_p = LaurentPoly(0, ad), LaurentPoly(0, bd)
        num = a.num * bd_p + b.num * ad_p
        den = a.den * bd_p
        return RatFunc(num, den)

    __radd__ = __add__

    @staticmethod
    def _raw_finish(num: LaurentPoly, den: LaurentPoly) -> "RatFunc":
        # num + k*den with coprime (num, den) stays coprime
        if num.is_zero():
            return ZERO
        return RatFunc._raw(num, den)

    def __neg__(self) -> "RatFunc":
        return RatFunc._raw(-self.num, self.den)

    def __sub__(self, other) -> "RatFunc":
        try:
            other = RatFunc._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RatFunc":
        return RatFunc._lift(other) - self

    def __mul__(self, other) -> "RatFunc":
        try:
            other = RatFunc._lift(other)
        except TypeError:
            return NotImplemented
        a, b = self, other
        if a.is_zero() or b.is_zero():
            return ZERO
        if a.den.is_monomial() and b.den.is_monomial():
            return RatFunc._raw(a.num * b.num, _ONE_POLY)
        if a.num.is_monomial() and a.den.is_monomial():
            return RatFunc._raw(b.num * a.num, b.den)
        if b.num.is_monomial() and b.den.is_monomial():
            return RatFunc._raw(a.num * b.num, a.den)
        an, ad = _cancel(a.num, b.den)
        bn, bd = _cancel(b.num, a.den)
        return RatFunc._normalized(an * bn, ad * bd)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        num, den = self.den, self.num
        shift = den.low
        return RatFunc._normalized(num.shift(-shift), den.shift(-shift))

    def __truediv__(self, other) -> "RatFunc":
        try:
            other = RatFunc._lift(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return self * other.inverse()

    def __rtruediv__(self, other) -> "RatFunc":
        return RatFunc._lift(other) / self

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_monomial():
            return RatFunc._raw(LaurentPoly._raw(self.num.low * n, (_coeff_pow(self.num.coeffs[0], n),)), _ONE_POLY)
        # powers of coprime pairs stay coprime
        return RatFunc._normalized(self.num**n, self.den**n)

    @staticmethod
    def _normalized(num: LaurentPoly, den: LaurentPoly) -> "RatFunc":
        """Finish a pair already known to be coprime with den.low == 0."""
        if num.is_zero():
            return ZERO
        c = den.coeffs[0]
        if c != 1:
            inv = 1 / c
            num, den = num * inv, den * inv
        return RatFunc._raw(num, den)

    def galois(self, a: int) -> "RatFunc":
        fn = lambda c: c.galois(a) if isinstance(c, CycRational) else c
        return RatFunc(self.num.map_coeffs(fn), self.den.map_coeffs(fn))

    # -- evaluation --------------------------------------------------------------
    def at_v(self, v):
        """Evaluate with v given directly (exact for rational v and zeta-free values)."""
        d = self.den.evaluate(v)
        if d == 0:
            raise PoleError("evaluation at a pole")
        return self.num.evaluate(v) / d

    def at_q(self, q):
        """Evaluate at q, choosing v = +sqrt(q) for positive real q.

        Exact for rational q when the value only has even powers of v.
        """
        if isinstance(q, (int, Fraction)) and self.in_q():
            q = Fraction(q)
            num = sum((c * q ** (e // 2) for e, c in self.num.terms()), Fraction(0))
            den = sum((c * q ** (e // 2) for e, c in self.den.terms()), Fraction(0))
            if den == 0:
                raise PoleError("evaluation at a pole")
            return num / den
        return self.at_v(sqrt_q(q))

    # -- comparison, hashing, text ------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, CycRational)):
            other = RatFunc.const(other)
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def in_q(self) -> bool:
        """True if the value is zeta-free with only even powers of v."""
        if not self.is_zeta_free():
            return False
        return all(e % 2 == 0 for p in (self.num, self.den) for e, _ in p.terms())

    def to_text(self) -> str:
        var, step = ("q", 2) if self.in_q() else ("v", 1)
        num = _poly_text(self.num, var, step)
        if self.den.is_monomial():
            return num
        if not self.num.is_monomial():
            num = "(%s)" % num
        den = _poly_text(self.den, var, step)
        return "%s/(%s)" % (num, den)

    __str__ = to_text

    def __repr__(self):
        return "RatFunc(%s)" % self.to_text()

    def to_json(self) -> dict:
        return {"num": _poly_json(self.num), "den": _poly_json(self.den)}

    @classmethod
    def from_json(cls, data: dict, m: int | None = None) -> "RatFunc":
        m = ZETA_ORDER if m is None else m
        return cls(_poly_from_json(data["num"], m), _poly_from_json(data["den"], m))


def _cancel(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if den.is_monomial() or num.is_monomial():
        return num, den
    g = _pgcd(list(num.coeffs), list(den.coeffs))
    if len(g) <= 1:
        return num, den
    return (
        LaurentPoly._raw(num.low, tuple(_pdivmod(list(num.coeffs), g)[0])),
        LaurentPoly._raw(den.low, tuple(_pdivmod(list(den.coeffs), g)[0])),
    )


def _canonical(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if den.is_zero():
        raise ZeroDivisionError("rational function with zero denominator")
    if num.is_zero():
        return LaurentPoly(), _ONE_POLY
    shift = den.low
    num, den = num.shift(-shift), den.shift(-shift)
    num, den = _cancel(num, den)
    c = den.coeffs[0]
    if c != 1:
        inv = 1 / c
        num, den = num * inv, den * inv
    return num, den


_ONE_POLY = LaurentPoly._raw(0, (Fraction(1),))
ZERO = RatFunc._raw(LaurentPoly(), _ONE_POLY)
ONE = RatFunc._raw(_ONE_POLY, _ONE_POLY)


def sqrt_q(q):
    """v = +sqrt(q); exact when q is the square of a rational."""
    if isinstance(q, (int, Fraction)):
        q = Fraction(q)
        if q >= 0:
            rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
            if rn * rn == q.numerator and rd * rd == q.denominator:
                return Fraction(rn, rd)
            return math.sqrt(q)
    if isinstance(q, float) and q >= 0:
        return math.sqrt(q)
    return cmath.sqrt(q)


# ---------------------------------------------------------------------------
# JSON serialization


def _coeff_json(c: Coeff) -> list[str]:
    if isinstance(c, CycRational):
        return [str(x) for x in c.coords]
    return [str(c)]


def _poly_json(p: LaurentPoly) -> list:
    return [[e, _coeff_json(c)] for e, c in p.terms()]


def _poly_from_json(data: list, m: int) -> LaurentPoly:
    terms = {}
    phi = euler_phi(m)
    for e, coords in data:
        coords = [Fraction(x) for x in coords]
        coords += [Fraction(0)] * (phi - len(coords))
        terms[int(e)] = cyc(m, coords)
    return LaurentPoly.from_dict(terms)


# ---------------------------------------------------------------------------
# text parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|(zeta|q|v)|(.))")


class _Parser:
    def __init__(self, text: str, m: int):
        self.tokens = []
        for num, name, op in _TOKEN.findall(text):
            if num:
                self.tokens.append(("num", int(num)))
            elif name:
                self.tokens.append(("name", name))
            elif op.strip():
                self.tokens.append(("op", op))
        self.pos = 0
        self.m = m

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ValueError("unexpected token %r" % (tok[1],))
        self.pos += 1
        return tok

    def parse(self) -> RatFunc:
        out = self.expr()
        if self.pos != len(self.tokens):
            raise ValueError("trailing input at token %r" % (self.peek()[1],))
        return out

    def expr(self) -> RatFunc:
        acc = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> RatFunc:
        acc = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            acc = acc * rhs if op == "*" else acc / rhs
        return acc

    def unary(self) -> RatFunc:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def exponent(self) -> Fraction:
        if self.peek() == ("op", "("):
            self.take()
            sign = -1 if self.peek() == ("op", "-") else 1
            if sign < 0:
                self.take()
            value = Fraction(self.take("num")[1])
            if self.peek() == ("op", "/"):
                self.take()
                value /= self.take("num")[1]
            self.take("op", ")")
            return sign * value
        sign = -1 if self.peek() == ("op", "-") else 1
        if sign < 0:
            self.take()
        return Fraction(sign * self.take("num")[1])

    def power(self) -> RatFunc:
        tok = self.peek()
        base_name = tok[1] if tok[0] == "name" else None
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            e = self.exponent()
            if base_name == "q":
                if (2 * e).denominator != 1:
                    raise ValueError("q exponent must be a multiple of 1/2")
                return RatFunc.monomial(int(2 * e))
            if e.denominator != 1:
                raise ValueError("fractional exponent only allowed on q")
            return base ** int(e)
        return base

    def atom(self) -> RatFunc:
        kind, value = self.take()
        if kind == "num":
            return RatFunc.const(value)
        if kind == "name":
            if value == "q":
                return RatFunc.q()
            if value == "v":
                return RatFunc.v()
            return RatFunc.const(zeta(1, self.m))
        if value == "(":
            inner = self.expr()
            self.take("op", ")")
            return inner
        raise ValueError("unexpected token %r" % (value,))


def parse_ratfunc(text: str, m: int | None = None) -> RatFunc:
    """Parse an expression in q, v (= q^(1/2)) and zeta with + - * / ^.

    >>> parse_ratfunc("(q^-1 - 1)^2/(q^-2 - 1)").to_text()
    '(1-q)/(1+q)'
    >>> parse_ratfunc("q^(3/2)") == RatFunc.monomial(3)
    True
    """
    return _Parser(text, ZETA_ORDER if m is None else m).parse()


# ---------------------------------------------------------------------------
# polynomial constructors and divisibility questions


def q_poly(coeffs: Iterable, low: int = 0) -> LaurentPoly:
    """Laurent polynomial in q from coefficients of q^low, q^(low+1), ..."""
    terms = {2 * (low + i): c for i, c in enumerate(coeffs)}
    return LaurentPoly.from_dict(terms)


def q_integer(n: int) -> LaurentPoly:
    """[n]_q = 1 + q + ... + q^(n-1)."""
    return q_poly([1] * n)


def cyclotomic_in_q(d: int) -> LaurentPoly:
    """Phi_d(q) written in v."""
    return q_poly(cyclotomic_poly(d))


def _content_free(p: LaurentPoly) -> list:
    if p.is_zero():
        raise ValueError("zero polynomial")
    return list(p.coeffs)


def divides_power_of(den: LaurentPoly, P: LaurentPoly) -> int | None:
    """Smallest k >= 0 with den | P^k up to powers of v, or None.

    >>> divides_power_of(q_poly([1, 0, 1]), q_integer(2) * q_integer(3) * q_integer(4))
    1
    >>> divides_power_of(q_poly([1, 0, 0, 0, 0, 1]), q_integer(2) * q_integer(3)) is None
    True
    """
    d = _content_free(den)
    p = _content_free(P)
    if len(d) == 1:
        return 0
    r = _pdivmod(p, d)[1]
    for k in range(1, len(d)):
        if not r:
            return k
        r = _pdivmod(_pmul(r, p), d)[1]
    return None if r else len(d)


def _rational_norm(p: LaurentPoly) -> list:
    """Coefficients of the product of all Galois conjugates of p (a Q-polynomial)."""
    coeffs = list(p.coeffs)
    cycs = [c for c in coeffs if isinstance(c, CycRational)]
    if not cycs:
        return coeffs
    m = cycs[0].m
    out = coeffs
    for a in range(2, m):
        if math.gcd(a, m) == 1:
            conj = [c.galois(a) if isinstance(c, CycRational) else c for c in coeffs]
            out = _pmul(out, conj)
    if any(isinstance(c, CycRational) for c in out):
        raise ArithmeticError("norm polynomial is not rational")
    return out


def cyclotomic_factorization(den: LaurentPoly) -> dict[int, int] | None:
    """Multiplicities of Phi_d(v) dividing den (norm taken over Q if needed).

    Returns None if some root of den is not a root of unity.
    """
    rest = _rational_norm(LaurentPoly(0, _content_free(den)))
    found: dict[int, int] = {}
    deg = len(rest) - 1
    d = 1
    while len(rest) > 1 and d <= 6 * deg + 6:
        if euler_phi(d) <= len(rest) - 1:
            phi_d = [Fraction(c) for c in cyclotomic_poly(d)]
            while len(rest) >= len(phi_d):
                quot, rem = _pdivmod(rest, phi_d)
                if rem:
                    break
                rest = quot
                found[d] = found.get(d, 0) + 1
        d += 1
    if len(rest) > 1:
        return None
    return found


def roots_are_roots_of_unity(den: LaurentPoly) -> bool:
    """True iff every root of den (in v) is a root of unity.

    Since q = v^2, this is the same as every root in q being a root of unity.

    >>> roots_are_roots_of_unity(q_poly([1, 2, 1]) * q_poly([1, 0, 1]))
    True
    >>> roots_are_roots_of_unity(q_poly([-2, 1]))
    False
    """
    return cyclotomic_factorization(den) is not None


def cyclotomic_label(d: int) -> str:
    names = {1: "1", 2: "-1", 4: "+-i"}
    if d in names:
        return "Phi%d(%s)" % (d, names[d])
    return "Phi%d(primitive %s roots)" % (d, _ordinal(d))


def _ordinal(d: int) -> str:
    if 10 <= d % 100 <= 20:
        suffix = "th"
    else:
        suffix = {1: "st", 2: "nd", 3: "rd"}.get(d % 10, "th")
    return "%d%s" % (d, suffix)


def has_common_factor(a: LaurentPoly, b: LaurentPoly) -> bool:
    """True when a and b share a nonconstant factor (ignoring powers of v)."""
    return len(_pgcd(_content_free(a), _content_free(b))) > 1
