from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latticegaps import geometry as geo
from latticegaps import steinhaus as sh
from latticegaps.latticecore import proposition_basis, steinhaus_basis
from latticegaps.reals import LinearForm, RandomGen, sqrt_form

from conftest import mp_gap_count

seeds = st.integers(0, 2**32 - 1)


def test_gap_after_direct_and_via_F():
    r2 = sqrt_form(2)
    body = geo.unit_box(1)
    for k, want in [(0, 3 * r2 - 4), (3, 3 - 2 * r2), (4, 3 - 2 * r2), (1, 3 * r2 - 4), (2, 3 - 2 * r2)]:
        assert sh.gap_after([r2], body, 5, (k,)) == want
        assert sh.gap_after_via_F([r2], body, 5, (k,)) == want


def test_gap_after_rejects_outside_points():
    with pytest.raises(ValueError):
        sh.gap_after([sqrt_form(2)], geo.unit_box(1), 5, (5,))


@given(seeds, st.integers(1, 3))
def test_identity_holds_on_random_instances(seed, d):
    rng = np.random.default_rng(seed)
    alpha, body, T = sh.random_instance(rng, d, T_range=(2, 5 if d < 3 else 3))
    res = sh.identity_check(alpha, body, T)
    assert res.mismatches == 0
    assert res.det_ok
    assert res.G <= res.n_candidates


@given(seeds, st.integers(1, 2))
def test_gap_count_matches_brute_force(seed, d):
    rng = np.random.default_rng(seed)
    alpha, body, T = sh.random_instance(rng, d)
    rec = sh.gap_count(alpha, body, T)
    pts = sh.points(body, T)
    assert (rec.G, rec.n_points) == mp_gap_count(alpha, pts)


@given(seeds, st.integers(1, 400))
def test_at_most_three_gaps_on_intervals(seed, N):
    alpha = [LinearForm.generator(RandomGen(seed))]
    assert sh.gap_count(alpha, geo.unit_box(1), N).G <= 3


def test_float_alpha_uses_numeric_clustering():
    exact = sh.gap_count([sqrt_form(2), sqrt_form(3)], geo.unit_box(2), 6)
    num = sh.gap_count([2**0.5, 3**0.5], geo.unit_box(2), 6)
    assert num.status == "numeric" and exact.status == "ok"
    assert num.G == exact.G and num.n_points == exact.n_points == 36


def test_scans_and_summaries():
    alpha = [sqrt_form(2), sqrt_form(3)]
    recs = sh.scan_homothetic(alpha, geo.unit_box(2), [2, 3, 4, 5], with_sv=True)
    assert [r.params for r in recs] == [(2,), (3,), (4,), (5,)]
    assert all(r.sv_norm > 0 for r in recs)
    assert sh.max_G(recs) == max(r.G for r in recs)
    assert sh.tail_min(recs) == min(r.G for r in recs[2:])
    assert sh.integer_grid(2, 2) == [(1, 1), (1, 2), (2, 1), (2, 2)]
    diag = sh.scan_diag(alpha, geo.unit_box(2), [(2, 3), (3, 2)])
    assert [r.n_points for r in diag] == [6, 6]


def test_budget_marks_record():
    recs = sh.scan_homothetic([sqrt_form(2), sqrt_form(3)], geo.unit_box(2), [100], budget=1000)
    assert recs[0].status == "budget"


def test_grid_count_bounded_by_sampled_and_candidates(rng):
    M, ctx = proposition_basis(geo.unit_box(2), Fraction(1, 10))
    g_R, g_all, n_c = sh.grid_vs_sampled(M, ctx.body, 8, 50, rng)
    assert 1 <= g_R <= g_all <= n_c


@settings(max_examples=100)
@given(seeds)
def test_grid_count_bounded_on_random_lattices(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 3))
    alpha, body, T = sh.random_instance(rng, d, T_range=(2, 4))
    M = steinhaus_basis(alpha, T)
    g_R, g_all, n_c = sh.grid_vs_sampled(M, body, int(rng.integers(2, 7)), 20, rng)
    assert g_R <= g_all <= n_c


def test_identity_body_keeps_points():
    body = geo.AxisBox((0, 0), (1, 1), (True, False), (True, True))
    T = (Fraction(5), Fraction(3))
    inner = sh.identity_body(body, T)
    a = geo.lattice_points(geo.dilate(body, T))
    b = geo.lattice_points(geo.dilate(inner, T))
    assert sorted(map(tuple, a)) == sorted(map(tuple, b))
    assert all(inner.interior().contains(tuple(Fraction(int(v)) / t for v, t in zip(k, T))) for k in b)
