"""Iterated residue evaluation of torus integrals.

``integrate_torus(f)`` returns (2 pi i)^-k times the integral of f dz_1...dz_k
over the unit torus, computed by eliminating one variable at a time: the
integral over |z| = 1 is the sum of residues at the poles inside the circle,
where "inside" is decided in the large-q regime (see
:func:`iwahori_plancherel.integrand.classify_poles`).

Elimination orders:

``"lowest"``
    always the lowest-indexed active variable.
``"chain"``
    after a substitution z_i = c z_j continue with z_j, otherwise take the
    lowest active variable.  With this order the branches of a GL_n density
    line up with chained clumps.
a sequence of indices
    a fixed priority list; the first active variable in it is eliminated.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from .integrand import Integrand, Monomial, PoleLocation, classify_poles, residue
from .qfield import ONE, ZERO, RatFunc

Order = Union[str, Sequence[int]]


@dataclass(frozen=True)
class PoleChoice:
    var: int
    kind: str
    order: int
    coeff: RatFunc | None = None
    target: Monomial | None = None

    @classmethod
    def of(cls, loc: PoleLocation) -> "PoleChoice":
        return cls(loc.var, loc.kind, loc.order, loc.coeff, loc.target)

    def describe(self) -> str:
        return PoleLocation(self.var, self.kind, self.order, self.coeff, self.target).describe()

    def target_var(self) -> int | None:
        """The single variable z_j in a location z_var = c z_j, if that is its shape."""
        if self.kind != "linear":
            return None
        nz = [i for i, e in enumerate(self.target) if e]
        if len(nz) == 1 and self.target[nz[0]] == 1:
            return nz[0]
        return None

    def to_json(self) -> dict:
        out = {"var": self.var + 1, "kind": self.kind, "order": self.order}
        if self.kind == "linear":
            out["coeff"] = self.coeff.to_text()
            out["target"] = list(self.target)
        return out


@dataclass(frozen=True)
class Clump:
    indices: tuple[int, ...]

    def __str__(self):
        return "{%s}" % ",".join(str(i + 1) for i in self.indices)


@dataclass(frozen=True)
class Branch:
    choices: tuple[PoleChoice, ...]
    value: RatFunc

    def clumps(self) -> list[Clump]:
        """Maximal chains z_a = c z_b, z_b = c' z_c, ... read off the decorations."""
        by_var = {c.var: c for c in self.choices}
        targets = {c.target_var() for c in self.choices if c.target_var() is not None}
        out = []
        for choice in self.choices:
            if choice.var in targets or choice.target_var() is None:
                continue
            chain = [choice.var]
            nxt = choice.target_var()
            while nxt is not None:
                chain.append(nxt)
                c = by_var.get(nxt)
                nxt = c.target_var() if c is not None else None
            out.append(Clump(tuple(chain)))
        return out

    def describe(self) -> str:
        return ", ".join(c.describe() for c in self.choices)

    def to_json(self) -> dict:
        return {
            "choices": [c.to_json() for c in self.choices],
            "value": self.value.to_text(),
            "clumps": [[i + 1 for i in c.indices] for c in self.clumps()],
        }


@dataclass
class EngineOptions:
    order: Order = "lowest"
    shortcut: bool = True
    reorder: bool = False
    memo: dict = field(default_factory=dict)


def _choose(f: Integrand, opts: EngineOptions, hint: int | None) -> int:
    active = f.active
    if opts.reorder:
        # prefer the variable with the mildest pole at 0
        return min(active, key=lambda i: (max(0, -f.prefactor[i]), i))
    order = opts.order
    if order == "lowest":
        return active[0]
    if order == "chain":
        if hint is not None and hint in active:
            return hint
        return active[0]
    for i in order:
        if i in active:
            return i
    raise ValueError("elimination order %r misses active variables" % (order,))


def _vanishes_by_degree(f: Integrand) -> bool:
    """Rotation invariance: a homogeneous integrand of degree != -k integrates to 0."""
    deg = f.total_degree()
    return deg is not None and deg != -len(f.active)


def _integrate(f: Integrand, opts: EngineOptions, hint: int | None) -> RatFunc:
    if f.is_zero():
        return ZERO
    if not f.active:
        return f.scalar
    if opts.shortcut and _vanishes_by_degree(f):
        return ZERO
    # memoize on the shape; the scalar just rides along
    key = (f.shape(), hint if opts.order == "chain" else None)
    cached = opts.memo.get(key)
    if cached is None:
        g = Integrand(ONE, f.prefactor, f.factors, f.active)
        var = _choose(g, opts, hint)
        cached = ZERO
        for loc in classify_poles(g, var):
            nxt = PoleChoice.of(loc).target_var()
            for term in residue(g, loc):
                cached = cached + _integrate(term, opts, nxt)
        opts.memo[key] = cached
    return f.scalar * cached


def integrate_torus(
    f: Integrand,
    order: Order = "lowest",
    shortcut: bool = True,
    reorder: bool = False,
) -> RatFunc:
    """(2 pi i)^-k times the integral of f dz over the unit torus of active variables."""
    return _integrate(f, EngineOptions(order, shortcut, reorder), None)


def integrate_monomial_family(
    f: Integrand,
    e: Sequence[int],
    order: Order = "lowest",
    shortcut: bool = True,
) -> RatFunc:
    """Integral of f * z^e.

    For a density of total degree -k (a dz/z density), the product has
    degree sum(e) - k, so the integral is 0 unless sum(e) = 0; that test
    runs first when ``shortcut`` is on.
    """
    g = f.times_monomial(tuple(e))
    if shortcut and _vanishes_by_degree(g):
        return ZERO
    return integrate_torus(g, order=order, shortcut=shortcut)


def _branches(f: Integrand, opts: EngineOptions, hint, path: tuple) -> list[Branch]:
    if f.is_zero():
        return []
    if not f.active:
        return [Branch(path, f.scalar)]
    var = _choose(f, opts, hint)
    out = []
    for loc in classify_poles(f, var):
        choice = PoleChoice.of(loc)
        for term in residue(f, loc):
            out.extend(_branches(term, opts, choice.target_var(), path + (choice,)))
    return out


def enumerate_tree(f: Integrand, order: Order = "chain", reorder: bool = False) -> list[Branch]:
    """All root-to-leaf residue paths with nonzero value.

    Paths reached through several summands (higher-order poles) are merged.
    """
    opts = EngineOptions(order, shortcut=False, reorder=reorder)
    merged: dict[tuple, RatFunc] = {}
    for b in _branches(f, opts, None, ()):
        merged[b.choices] = merged.get(b.choices, ZERO) + b.value
    return [Branch(path, value) for path, value in merged.items() if not value.is_zero()]
