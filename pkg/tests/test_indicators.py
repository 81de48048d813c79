import math

import numpy as np
import pytest

from truncarch.indicators import (
    additive_epsilon,
    hv_contributions,
    hypervolume,
    ibea_fitness,
    igd,
    pbi,
    perpendicular_distance,
)
from truncarch.selftest import hv_inclusion_exclusion, hv_monte_carlo


def random_set(rng, m=None, n=None, grid=False):
    m = m or int(rng.integers(2, 4))
    n = n or int(rng.integers(1, 11))
    if grid:  # integer grid forces duplicates and dominated points
        return rng.integers(0, 4, size=(n, m)).astype(float), np.full(m, 4.0)
    return rng.random((n, m)), np.full(m, 1.1)


# -- hypervolume ----------------------------------------------------------------

def test_hv_2d_example():
    pts = [(0.25, 0.75), (0.75, 0.25)]
    assert hypervolume(pts, (1.0, 1.0)) == pytest.approx(0.3125, rel=1e-12)
    assert hv_inclusion_exclusion(pts, (1.0, 1.0)) == pytest.approx(0.3125, rel=1e-12)


def test_hv_3d_example():
    pts = [(0.2, 0.6, 0.6), (0.6, 0.2, 0.6)]
    ref = (1.0, 1.0, 1.0)
    oracle = hv_inclusion_exclusion(pts, ref)
    assert oracle == pytest.approx(0.192, rel=1e-12)
    assert hypervolume(pts, ref) == pytest.approx(oracle, rel=1e-12)


def test_hv_edge_cases():
    assert hypervolume([], (1.0, 1.0)) == 0.0
    assert hypervolume([(1.0, 1.0)], (1.0, 1.0)) == 0.0  # on the reference
    assert hypervolume([(2.0, 0.5), (0.5, 2.0)], (1.0, 1.0)) == 0.0
    with pytest.raises(ValueError):
        hypervolume([(1.0, 2.0, 3.0, 4.0)], (5.0, 5.0, 5.0, 5.0))
    with pytest.raises(ValueError):
        hypervolume([(1.0, 2.0)], (1.0, 1.0, 1.0))


def test_hv_matches_inclusion_exclusion_random():
    rng = np.random.default_rng(42)
    for trial in range(80):
        pts, ref = random_set(rng, grid=bool(trial % 2))
        assert hypervolume(pts, ref) == pytest.approx(
            hv_inclusion_exclusion(pts, ref), rel=1e-11, abs=1e-13
        )


def test_hv_monotone_under_insertion():
    rng = np.random.default_rng(3)
    for _ in range(30):
        pts, ref = random_set(rng, n=8)
        base = hypervolume(pts, ref)
        extra = np.vstack([pts, rng.random((1, pts.shape[1]))])
        assert hypervolume(extra, ref) >= base - 1e-12


def test_hv_monte_carlo_sanity():
    pts = [(0.2, 0.6, 0.6), (0.6, 0.2, 0.6)]
    est, se = hv_monte_carlo(pts, (1.0, 1.0, 1.0), samples=200_000, seed=9)
    assert abs(est - 0.192) <= 4.0 * se


# -- hv_contributions -----------------------------------------------------------

def test_contributions_2d_example():
    pts = [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]
    got = hv_contributions(pts, (2.0, 2.0))
    assert got == pytest.approx([0.5, 0.25, 0.5], rel=1e-12)


def test_contributions_dominated_and_duplicate():
    pts = [(0.0, 1.0), (1.0, 1.0), (0.0, 1.0)]
    got = hv_contributions(pts, (2.0, 2.0))
    assert got[1] == 0.0  # dominated
    assert got[0] == 0.0 and got[2] == 0.0  # duplicates cover each other


def test_contributions_match_leave_one_out_oracle():
    rng = np.random.default_rng(17)
    for trial in range(60):
        pts, ref = random_set(rng, grid=bool(trial % 3 == 0))
        got = hv_contributions(pts, ref)
        full = hv_inclusion_exclusion(pts, ref)
        for i in range(len(pts)):
            rest = np.delete(pts, i, axis=0)
            expected = full - hv_inclusion_exclusion(rest, ref)
            assert got[i] == pytest.approx(expected, rel=1e-10, abs=1e-12)


def test_contributions_independent_of_input_order():
    rng = np.random.default_rng(5)
    pts, ref = random_set(rng, m=3, n=10)
    base = hv_contributions(pts, ref)
    perm = rng.permutation(len(pts))
    shuffled = hv_contributions(pts[perm], ref)
    assert shuffled == pytest.approx(base[perm], rel=1e-12)


def test_contributions_sum_bounded_by_hv():
    rng = np.random.default_rng(29)
    for _ in range(20):
        pts, ref = random_set(rng, m=3)
        total = hv_contributions(pts, ref).sum()
        assert total <= hypervolume(pts, ref) + 1e-12
        assert (hv_contributions(pts, ref) >= 0).all()


# -- additive epsilon ------------------------------------------------------------

def test_epsilon_examples():
    a = [(0.0, 1.0), (1.0, 0.0)]
    assert additive_epsilon(a, a) == 0.0
    assert additive_epsilon([(0.0, 1.0)], [(1.0, 0.0)]) == pytest.approx(1.0)


def test_epsilon_matches_double_loop():
    rng = np.random.default_rng(31)
    for _ in range(40):
        a = rng.random((int(rng.integers(1, 6)), 3))
        b = rng.random((int(rng.integers(1, 6)), 3))
        expected = max(
            min(max(ai - bi for ai, bi in zip(av, bv)) for av in a) for bv in b
        )
        assert additive_epsilon(a, b) == pytest.approx(expected, rel=1e-12)


def test_epsilon_nonpositive_when_dominating():
    # A weakly dominates B -> eps(A, B) <= 0
    a = [(0.0, 0.0), (0.5, 0.1)]
    b = [(0.5, 0.5), (1.0, 0.2)]
    assert additive_epsilon(a, b) <= 0.0


# -- IBEA fitness ----------------------------------------------------------------

def ibea_direct(points, kappa):
    """Straight-from-the-formula evaluation used as the test oracle."""
    pts = np.asarray(points, dtype=float)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    z = (pts - lo) / span
    n = len(pts)
    inds = {}
    for yi in range(n):
        for xi in range(n):
            if yi != xi:
                inds[yi, xi] = max(z[yi] - z[xi])
    c = max((abs(v) for v in inds.values()), default=0.0) or 1.0
    out = np.zeros(n)
    for xi in range(n):
        out[xi] = -sum(
            math.exp(-inds[yi, xi] / (kappa * c)) for yi in range(n) if yi != xi
        )
    return out


def test_ibea_two_point_example():
    got = ibea_fitness([(0.0, 1.0), (1.0, 0.0)], kappa=0.05)
    assert got == pytest.approx([-math.exp(-20.0)] * 2, rel=1e-12)


def test_ibea_identical_pair():
    got = ibea_fitness([(0.3, 0.3), (0.3, 0.3)], kappa=0.05)
    assert got == pytest.approx([-1.0, -1.0], rel=1e-12)


def test_ibea_three_point_ordering():
    # Oracle-derived: the middle point is reinforced from both neighbours at
    # indicator 0.5, the boundaries see one at 0.5 and one at 1.0, so the
    # middle point carries the minimum fitness.
    pts = [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]
    oracle = ibea_direct(pts, 0.05)
    assert oracle[1] < oracle[0] == pytest.approx(oracle[2], rel=1e-12)
    got = ibea_fitness(pts, kappa=0.05)
    assert got == pytest.approx(oracle, rel=1e-12)


def test_ibea_matches_direct_random():
    rng = np.random.default_rng(57)
    for _ in range(30):
        pts = rng.random((int(rng.integers(2, 9)), 3))
        assert ibea_fitness(pts, 0.05) == pytest.approx(
            ibea_direct(pts, 0.05), rel=1e-10
        )


def test_ibea_affine_invariance():
    rng = np.random.default_rng(8)
    pts = rng.random((7, 3))
    scaled = pts * np.array([3.0, 10.0, 0.5]) + np.array([1.0, -2.0, 4.0])
    assert ibea_fitness(scaled, 0.05) == pytest.approx(
        ibea_fitness(pts, 0.05), rel=1e-9
    )


# -- IGD --------------------------------------------------------------------------

def test_igd_example():
    refs = [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]
    got = igd([(0.0, 1.0), (1.0, 0.0)], refs)
    assert got == pytest.approx(math.sqrt(0.5) / 3.0, rel=1e-12)


def test_igd_zero_for_refset_itself():
    refs = np.random.default_rng(2).random((50, 3))
    assert igd(refs, refs) == 0.0


def test_igd_monotone_under_archive_growth():
    rng = np.random.default_rng(77)
    refs = rng.random((40, 3))
    pts = rng.random((10, 3))
    more = np.vstack([pts, rng.random((5, 3))])
    assert igd(more, refs) <= igd(pts, refs) + 1e-12


def test_igd_errors():
    with pytest.raises(ValueError):
        igd([], [(0.0, 1.0)])
    with pytest.raises(ValueError):
        igd([(0.0, 1.0)], [])


# -- PBI / perpendicular distance -------------------------------------------------

def test_pbi_on_ray():
    got = pbi((0.5, 0.5), (1.0, 1.0), ideal=(0.0, 0.0), theta=5.0)
    assert got == pytest.approx(math.sqrt(0.5), rel=1e-12)


def test_pbi_theta_zero_is_projection():
    assert pbi((0.3, 0.7), (1.0, 0.0), theta=0.0) == pytest.approx(0.3)


def test_pbi_clamps_behind_ideal():
    # projection would be negative; clamp leaves pure perpendicular penalty
    got = pbi((-1.0, -1.0), (1.0, 1.0), ideal=(0.0, 0.0), theta=5.0)
    assert got == pytest.approx(5.0 * math.sqrt(2.0), rel=1e-12)


def test_pbi_example_values():
    assert pbi((0.2, 0.8), (1.0, 0.0), theta=5.0) == pytest.approx(0.2 + 5 * 0.8)
    assert pbi((0.8, 0.2), (1.0, 0.0), theta=5.0) == pytest.approx(0.8 + 5 * 0.2)


def test_perpendicular_distance():
    assert perpendicular_distance((0.5, 0.5), (1.0, 0.0)) == pytest.approx(0.5)
    assert perpendicular_distance((0.4, 0.4), (1.0, 1.0)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        perpendicular_distance((0.5, 0.5), (0.0, 0.0))
