from __future__ import annotations

import itertools

import pytest

from iwahori_plancherel.gln import LeviSpec, density_integrand
from iwahori_plancherel.integrand import ContourPoleError, Integrand
from iwahori_plancherel.qfield import ONE, ZERO, RatFunc
from iwahori_plancherel.residue import enumerate_tree, integrate_monomial_family, integrate_torus

q = RatFunc.q()


def density(*blocks):
    return density_integrand(LeviSpec(tuple(blocks)))


def test_gl2_density():
    assert integrate_torus(density(1, 1)) == 2 / (1 + q)


def test_less_singular_cell_density():
    assert integrate_torus(density(2, 2)) == 2 / (1 + q**2)


def test_gl3_density():
    assert integrate_torus(density(1, 1, 1)) == 6 / ((1 + q) * (1 + q + q**2))


def test_monomial_family_shortcut():
    f = density(1, 1)
    assert integrate_monomial_family(f, (0, -1)) == ZERO
    assert integrate_monomial_family(f, (0, 0)) == 2 / (1 + q)


def test_monomial_family_matches_brute_force():
    f = density(1, 1)
    fast = integrate_monomial_family(f, (1, -1))
    slow = integrate_torus(f.times_monomial((1, -1)), shortcut=False)
    assert fast == slow
    assert not fast.is_zero()


def test_shortcut_off_still_vanishes():
    f = density(1, 2)
    assert integrate_torus(f.times_monomial((2, 0)), shortcut=False) == ZERO


@pytest.mark.parametrize("blocks", [(1, 1), (1, 2), (1, 1, 1), (1, 1, 2), (2, 2)])
def test_order_and_reorder_invariance(blocks):
    f = density(*blocks)
    base = integrate_torus(f)
    k = len(blocks)
    for perm in itertools.permutations(range(k)):
        assert integrate_torus(f, order=perm) == base
    assert integrate_torus(f, order="chain") == base
    assert integrate_torus(f, reorder=True) == base


def test_reorder_handles_high_zero_order():
    f = density(1, 1).times_monomial((-2, 2))
    assert integrate_torus(f, reorder=True) == integrate_torus(f, shortcut=False)


def test_gl2_branches():
    branches = enumerate_tree(density(1, 1))
    described = sorted(b.describe() for b in branches)
    assert described == ["z1=0, z2=0", "z1=[q^-1] z2, z2=0"]
    values = {b.describe(): b.value for b in branches}
    assert values["z1=0, z2=0"] == ONE
    assert values["z1=[q^-1] z2, z2=0"] == (1 - q) / (1 + q)


def test_single_variable_branch():
    (branch,) = enumerate_tree(density(3))
    assert branch.describe() == "z1=0"
    assert branch.value == ONE


@pytest.mark.parametrize("blocks", [(1, 1, 1), (1, 1, 2), (1, 2, 3), (1, 1, 1, 1)])
def test_branch_sum_identity(blocks):
    f = density(*blocks)
    total = sum((b.value for b in enumerate_tree(f)), ZERO)
    assert total == integrate_torus(f)


def test_branch_count_and_clumps_four_blocks():
    branches = enumerate_tree(density(1, 1, 1, 1))
    # set partitions of 4 indices, each block led by its minimum and otherwise freely ordered: 4! of them
    assert len(branches) == 24
    clump_sets = {tuple(tuple(i + 1 for i in c.indices) for c in b.clumps()) for b in branches}
    rooted_at_zero = {c for c in clump_sets if all(1 not in clump for clump in c)}
    for expected in [((3, 4),), ((2, 3, 4),), ((2, 3),), ((2, 4),), ((2, 4, 3),)]:
        assert expected in rooted_at_zero


def test_every_variable_once_per_branch():
    for b in enumerate_tree(density(1, 1, 2)):
        assert sorted(c.var for c in b.choices) == [0, 1, 2]


def test_contour_pole_propagates():
    f = Integrand.build(ONE, (-1, 0), [((1, 0), (0, 1), ONE, -1)])
    with pytest.raises(ContourPoleError):
        integrate_torus(f)


def test_branch_json():
    (b,) = [b for b in enumerate_tree(density(1, 1)) if len(b.clumps()) == 1]
    data = b.to_json()
    assert data["clumps"] == [[1, 2]]
    assert data["choices"][0] == {"var": 1, "kind": "linear", "order": 1, "coeff": "q^-1", "target": [0, 1]}
