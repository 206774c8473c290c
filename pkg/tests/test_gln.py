from __future__ import annotations

import pytest

from iwahori_plancherel.gln import (
    LeviSpec,
    build_gln_density,
    c_M,
    closed_form_value,
    conjectured_numerator_degree,
    engine_value,
    fd1,
    numerator_degree,
    ordered_block_structures,
    partitions,
    poincare_sym,
    singularity_report,
)
from iwahori_plancherel.qfield import ONE, RatFunc, q_poly
from iwahori_plancherel.residue import integrate_torus
from iwahori_plancherel.weyl import degrees, exponents, poincare

q = RatFunc.q()


def L(*blocks):
    return LeviSpec(tuple(blocks))


def test_levi_parse_sorts():
    assert LeviSpec.parse("2,1,1") == L(1, 1, 2)
    assert L(1, 1, 2).n == 4
    assert L(1, 1, 2).multiplicities() == {1: 2, 2: 1}


def test_levi_rejects_bad_blocks():
    with pytest.raises(ValueError):
        L(2, 1)
    with pytest.raises(ValueError):
        L(0, 1)


def test_partition_counts():
    assert [len(list(partitions(n))) for n in range(1, 8)] == [1, 2, 3, 5, 7, 11, 15]


def test_cm_values():
    assert c_M(L(1, 1)) == ONE
    assert c_M(L(1, 1, 1)) == ONE
    assert c_M(L(2, 2)) == q**2 * (q - 1) ** 2 / (4 * (q + 1) ** 2)


def test_density_shapes():
    cm, f = build_gln_density(L(2, 2))
    assert f.prefactor == (-1, -1)
    coeffs = sorted(fac.coeff.to_text() for fac in f.factors)
    assert coeffs == ["1", "q^-2", "q^2"]


@pytest.mark.parametrize(
    "blocks, expected",
    [((1, 1), 2 / (1 + q)), ((2, 2), 2 / (1 + q**2)), ((1, 1, 1), 6 / ((1 + q) * (1 + q + q**2)))],
)
def test_closed_form_examples(blocks, expected):
    assert closed_form_value(L(*blocks)) == expected


def test_fd1_examples():
    assert fd1(L(1, 1)) == 1 / (1 + q)
    assert fd1(L(2, 2)) == c_M(L(2, 2)) / (1 + q**2)
    assert fd1(L(1, 1), rank=3) == 3 / (1 + q)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_lowest_cell(n):
    assert fd1(L(*[1] * n)) == 1 / RatFunc.from_poly(poincare_sym(n))


@pytest.mark.parametrize("levi", list(partitions(4)) + list(partitions(5)), ids=lambda l: l.label())
def test_closed_forms_match_engine(levi):
    value = engine_value(levi)
    assert closed_form_value(levi, "post") == value
    assert closed_form_value(levi, "pre") == value


def test_literal_post_form_disagrees_for_mixed_blocks():
    levi = L(1, 1, 2)
    assert closed_form_value(levi, "literal") != engine_value(levi)
    # where all blocks are equal the index shift is invisible
    assert closed_form_value(L(1, 1, 1), "literal") == engine_value(L(1, 1, 1))


def test_branch_structures_count():
    import math

    for k in range(1, 6):
        assert len(list(ordered_block_structures(tuple(range(k))))) == math.factorial(k)


def test_singularity_report_22():
    report = singularity_report(L(2, 2))
    assert report.regular == (3,)
    assert report.singular == (2, 4)
    assert report.divides_k == 1


def test_singularity_report_small():
    assert singularity_report(L(1, 1)).singular == (2,)
    r = singularity_report(L(1))
    assert r.singular == () and r.regular == ()


def test_poincare_families():
    assert RatFunc.from_poly(poincare("A2")) == (1 + q) * (1 + q + q**2)
    assert RatFunc.from_poly(poincare("C2")) == (1 + q) ** 2 * (1 + q**2)
    assert RatFunc.from_poly(poincare("G2")) == (1 + q) * (1 + q + q**2 + q**3 + q**4 + q**5)
    assert poincare("A1") == q_poly([1, 1])
    assert degrees("F4") == (2, 6, 8, 12)
    assert exponents("B3") == (1, 3, 5)
    with pytest.raises(ValueError):
        degrees("H3")


@pytest.mark.parametrize("n", range(1, 6))
def test_numerator_degree_matches_conjecture(n):
    measured = max(numerator_degree(fd1(levi)) for levi in partitions(n))
    assert measured == conjectured_numerator_degree(n)
    assert numerator_degree(fd1(L(n))) == measured
