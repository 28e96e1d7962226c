from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from latticegaps import geometry as geo
from latticegaps.circleset import (
    GenericIndependent,
    RationalBeta,
    distinct_count_numeric,
    frac_points,
    gap_spectrum,
    spectrum,
)
from latticegaps.reals import LinearForm, RandomGen, sqrt_form

from conftest import mp_gap_count

seeds = st.integers(0, 2**40)


def box_points(*ranges):
    grids = np.meshgrid(*[np.arange(a, b) for a, b in ranges], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def test_sqrt2_five_points():
    rep = spectrum([sqrt_form(2)], box_points((0, 5)))
    r2 = sqrt_form(2)
    assert rep.count == 2
    assert dict(rep.distinct_gaps) == {3 - 2 * r2: 3, 3 * r2 - 4: 2}
    assert rep.gap_sum() == 1


def test_rational_alpha_collapses_duplicates():
    pts = frac_points([Fraction(1, 3)], box_points((0, 7)))
    assert pts == [0, Fraction(1, 3), Fraction(2, 3)]
    assert spectrum([Fraction(1, 3)], box_points((0, 7))).count == 1


def test_two_dimensional_grid():
    rep = spectrum([sqrt_form(2), sqrt_form(3)], box_points((0, 2), (0, 2)))
    assert rep.count == 3 and rep.n_points == 4
    assert [m for _, m in rep.distinct_gaps] == [1, 2, 1]


@given(seeds, st.integers(1, 3), st.integers(1, 12))
def test_count_matches_high_precision_brute_force(seed, d, n):
    alpha = [LinearForm.generator(RandomGen(seed * 4 + i)) for i in range(d)]
    pts = box_points(*[(0, n)] * d)
    rep = spectrum(alpha, pts)
    assert (rep.count, rep.n_points) == mp_gap_count(alpha, pts)
    assert rep.gap_sum() == 1


@given(st.lists(st.sampled_from([2, 3, 5, 7]), min_size=1, max_size=3),
       st.lists(st.fractions(-3, 3, max_denominator=6), min_size=3, max_size=3), st.integers(1, 9))
def test_counts_with_shared_generators(rads, coefs, n):
    # coordinates may share generators, so exact duplicates and ties occur
    d = len(rads)
    alpha = [sqrt_form(rads[i]) * coefs[i] + Fraction(1, 1 + i) + sqrt_form(rads[0]) for i in range(d)]
    pts = box_points(*[(-n, n)] * d)
    rep = spectrum(alpha, pts)
    assert (rep.count, rep.n_points) == mp_gap_count(alpha, pts)
    assert rep.gap_sum() == 1


def test_large_coordinates_use_the_multiprecision_path():
    alpha = [sqrt_form(2) * 1000003, sqrt_form(3)]
    pts = np.array([[2**40 + k, 3 * k] for k in range(30)], dtype=np.int64)
    rep = spectrum(alpha, pts)
    assert (rep.count, rep.n_points) == mp_gap_count(alpha, pts, bits=400)


def test_points_are_sorted_in_unit_interval():
    alpha = [LinearForm.generator(RandomGen(5)), sqrt_form(5)]
    pts = frac_points(alpha, box_points((0, 9), (-4, 5)))
    assert all(0 <= p < 1 for p in pts)
    assert all(a < b for a, b in zip(pts, pts[1:]))


def test_gap_after_labels():
    rep = spectrum([sqrt_form(2)], box_points((0, 5)))
    # 1.414, 2.828, 4.243 ... frac order 0, 0.243, 0.414, 0.657, 0.828
    assert rep.gap_after((0,)) == sqrt_form(2) * 3 - 4
    with pytest.raises(KeyError):
        rep.gap_after((9,))


def test_gap_spectrum_validates_points():
    rep = gap_spectrum([0, Fraction(1, 4), sqrt_form(2) - 1])
    assert rep.count == 3
    with pytest.raises(ValueError):
        gap_spectrum([Fraction(1, 2), Fraction(1, 2)])
    with pytest.raises(ValueError):
        gap_spectrum([sqrt_form(2)])


def test_rational_beta_normalisation():
    rel = RationalBeta.from_affine((Fraction(1, 3), Fraction(1, 5)), (Fraction(1, 2), 0), sqrt_form(2))
    assert (rel.Q, rel.B) == (2, (5, 3))
    assert rel.beta == sqrt_form(2) * Fraction(2, 15)
    assert rel.alpha() == (sqrt_form(2) / 3 + Fraction(1, 2), sqrt_form(2) / 5)
    for a, b in zip(rel.alpha(), rel.B):
        assert (a * rel.Q - rel.beta * b).is_rational
        assert (a * rel.Q - rel.beta * b).to_fraction().denominator == 1


def test_rational_beta_rejects_bad_input():
    with pytest.raises(ValueError):
        RationalBeta(2, (2, 4), (0, 0))
    with pytest.raises(ValueError):
        RationalBeta(2, (1, 3), (Fraction(1, 3), 0))


def test_generic_independence_check():
    GenericIndependent(2).check([sqrt_form(2), sqrt_form(3)])
    with pytest.raises(ValueError):
        GenericIndependent(2).check([sqrt_form(2), sqrt_form(8) + 1])


def test_numeric_cluster_count():
    x = np.array([0.1, 0.1 + 1e-15, 0.3, 0.3, 0.7])
    assert distinct_count_numeric(x) == 3


def test_relation_is_checked_on_use():
    rel = RationalBeta(2, (1, 1), (0, 0))
    with pytest.raises(ValueError):
        spectrum([sqrt_form(3), sqrt_form(2)], box_points((0, 2), (0, 2)), rel)
