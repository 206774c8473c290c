from __future__ import annotations

import random
import time

from iwahori_plancherel import rank2
from iwahori_plancherel.gln import (
    LeviSpec,
    c_M,
    closed_form_value,
    density_integrand,
    engine_value,
    fd1,
    partitions,
    poincare_sym,
    singularity_report,
)
from iwahori_plancherel.oracle import QuadratureSpec, quadrature, quadrature_result, refinement_steps, rel_error
from iwahori_plancherel.qfield import RatFunc, divides_power_of
from iwahori_plancherel.residue import integrate_torus
from iwahori_plancherel.weyl import poincare

q = RatFunc.q()
v = RatFunc.v()


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def test_criterion_01_gl2_lowest_cell(criterion):
    value, secs = timed(lambda: fd1(LeviSpec((1, 1)), value=engine_value(LeviSpec((1, 1)))))
    ok = value == 1 / (1 + q) and secs < 1
    criterion(1, ok, "fd1((1,1)) = %s in %.3fs" % (value.to_text(), secs))


def test_criterion_02_lowest_cell_law(criterion):
    ok, details = True, []
    for n in range(2, 6):
        levi = LeviSpec((1,) * n)
        value, secs = timed(lambda: fd1(levi, value=engine_value(levi)))
        expected = 1 / RatFunc.from_poly(poincare_sym(n))
        good = value == expected and fd1(levi) == expected
        if n == 5:
            good = good and secs < 60
        ok &= good
        details.append("n=%d %s %.2fs" % (n, "ok" if good else "MISMATCH", secs))
    criterion(2, ok, "; ".join(details))


def test_criterion_03_less_singular_cell(criterion):
    levi = LeviSpec((2, 2))
    value = engine_value(levi)
    report = singularity_report(levi, value=value)
    ok = value == 2 / (1 + q**2) and 3 in report.regular and 3 not in report.singular
    criterion(3, ok, "engine = %s, regular orders %s, singular orders %s" % (value.to_text(), report.regular, report.singular))


def test_criterion_04_gl3_density(criterion):
    levi = LeviSpec((1, 1, 1))
    exact = integrate_torus(density_integrand(levi))
    approx = quadrature(density_integrand(levi), QuadratureSpec(2, 2048))
    err = rel_error(exact, approx, 2)
    expected = 6 / ((1 + q) * (1 + q + q**2))
    # the printed constant 6! would give 720/((1+q)(1+q+q^2))
    printed = 720 / ((1 + q) * (1 + q + q**2))
    ok = exact == expected and err <= 1e-9 and abs(approx - 6 / 21) <= 1e-9 * 6 / 21 and exact != printed
    criterion(4, ok, "engine = %s, quadrature(q=2) = %.15f, relerr %.2e, printed 6! rejected" % (exact.to_text(), approx.real, err))


def test_criterion_05_vanishing_off_degree(criterion):
    rng = random.Random(20240905)
    cells = [levi for n in range(1, 5) for levi in partitions(n)]
    checked = vanished = 0
    ok = True
    for trial in range(100):
        levi = rng.choice(cells)
        k = len(levi.blocks)
        exps = [rng.randint(-3, 3) for _ in range(k)]
        # half the trials satisfy the degree condition so the nonvanishing side is exercised too
        if trial % 2 == 0:
            exps[-1] -= sum(exps)
        f = density_integrand(levi).times_monomial(tuple(exps))
        fast = integrate_torus(f)
        slow = integrate_torus(f, shortcut=False)
        ok &= fast == slow
        if sum(exps) != 0:
            ok &= fast.is_zero() and slow.is_zero()
            vanished += 1
        checked += 1
    criterion(5, ok, "%d tuples, %d failing the degree condition all vanish, shortcut off agrees" % (checked, vanished))


def test_criterion_06_closed_form_matches_engine(criterion):
    mismatches, total = [], 0
    for n in range(1, 6):
        for levi in partitions(n):
            cm = c_M(levi)
            engine = cm * engine_value(levi)
            total += 1
            if cm * closed_form_value(levi, "post") != engine or cm * closed_form_value(levi, "pre") != engine:
                mismatches.append(levi.label())
    criterion(6, not mismatches, "%d cells, mismatches: %s" % (total, mismatches or "none"))


def test_criterion_07_divisibility(criterion):
    worst, bad = 0, []
    for n in range(1, 7):
        for levi in partitions(n):
            k = divides_power_of(fd1(levi).den, poincare_sym(n))
            if k is None or k > n:
                bad.append(levi.label())
            else:
                worst = max(worst, k)
    criterion(7, not bad, "all cells n <= 6, largest k = %d, failures: %s" % (worst, bad or "none"))


def test_criterion_08_order_invariance(criterion):
    rng = random.Random(8)
    bad, cells = [], 0
    for n in range(1, 5):
        for levi in partitions(n):
            f = density_integrand(levi)
            base = integrate_torus(f)
            cells += 1
            for _ in range(20):
                order = list(range(len(levi.blocks)))
                rng.shuffle(order)
                if integrate_torus(f, order=tuple(order)) != base:
                    bad.append((levi.label(), tuple(order)))
    criterion(8, not bad, "%d cells x 20 orders, disagreements: %s" % (cells, bad or "none"))


def test_criterion_09_sp4_mh(criterion):
    mismatched = []
    for e in range(4):
        expected = q ** (-2 * e - 2) * (q**-2 - q) / (1 + q + q**2 + q**3)
        if rank2.sp4_component_integral("Mh", e) != expected:
            mismatched.append(e)
    for e in (-1, -2):
        expected = q ** (-2 * e - 2) * (q**-2 - q) / (1 + q + q**2 + q**3)
        if not (rank2.sp4_component_integral("Mh", e) - expected).is_laurent():
            mismatched.append(e)
    criterion(9, not mismatched, "dz/z measure, exponents failing: %s" % (mismatched or "none"))


def test_criterion_10_sp4_ms(criterion):
    mismatched = []
    for e in range(-2, 3):
        displayed = v ** (-6 + 9 - 3 * e) / ((1 + q) * (1 + q**2)) + q**e * v / (1 + q) ** 2
        if not (rank2.sp4_component_integral("Ms", e) - displayed).is_laurent():
            mismatched.append(e)
    criterion(10, not mismatched, "dz/z measure, exponents failing: %s" % (mismatched or "none"))


def test_criterion_11_g2(criterion):
    bad, worst = [], 0.0
    for levi in ("M1", "M2"):
        entry = rank2.density("G2", levi)
        for e in range(-3, 4):
            value = rank2.g2_component_integral(levi, e)
            bare = rank2.g2_component_integral(levi, e, with_prefactor=False)
            if not (value.is_zeta_free() and rank2.integer_coefficients(bare)):
                bad.append((levi, e, "coefficients"))
            if divides_power_of(value.den, poincare("G2")) is None:
                bad.append((levi, e, "denominator"))
            f = entry.integrand.times_monomial((e - 1,))
            for q0 in (2, 3):
                err = rel_error(bare, quadrature(f, QuadratureSpec(q0, 1024)), q0)
                worst = max(worst, err)
                if err > 1e-8:
                    bad.append((levi, e, "oracle q=%d" % q0))
    criterion(11, not bad, "|e| <= 3 for M1, M2; max oracle relerr %.2e; failures: %s" % (worst, bad or "none"))


def test_criterion_12_formal_degrees(criterion):
    catalog = rank2.load_catalog()
    failed = [entry.label for entry in catalog if not rank2.check_formal_degree_poles(entry)]
    criterion(12, not failed, "%d catalog entries, failures: %s" % (len(catalog), failed or "none"))


def _acceptance_integrands():
    for blocks in ((1, 1), (2, 2), (1, 1, 1)):
        f = density_integrand(LeviSpec(blocks))
        yield "GL %s" % (blocks,), f
    for group, levi in (("Sp4", "Mh"), ("Sp4", "Ms"), ("G2", "M1"), ("G2", "M2")):
        f = rank2.density(group, levi).integrand.times_monomial((-1,))
        yield "%s %s" % (group, levi), f


def test_criterion_13_oracle_convergence(criterion):
    bad, notes = [], []
    for name, f in _acceptance_integrands():
        exact = integrate_torus(f)
        steps = refinement_steps(exact, f, 2, [256, 2048])
        (_, coarse, _), (_, fine, fine_floor) = steps
        decreased = fine <= max(coarse, fine_floor)
        res = quadrature_result(f, QuadratureSpec(2, 4096))
        err = rel_error(exact, res.value, 2)
        if not decreased or err > 1e-9:
            bad.append(name)
        notes.append("%s %.1e/%.1e/%.1e" % (name, coarse, fine, err))
    criterion(13, not bad, "q=2 errors at 256/2048 and relerr at 4096: %s; failures: %s" % ("; ".join(notes), bad or "none"))
