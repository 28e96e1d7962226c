import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from latticegaps import geometry as geo
from latticegaps import ratsum as rs
from latticegaps.circleset import RationalBeta
from latticegaps.reals import sqrt_form
from latticegaps.steinhaus import gap_count

seeds = st.integers(0, 2**32 - 1)


def plain_sumset(spec):
    return sorted({sum(a * q for a, q in zip(c, spec.q))
                   for c in itertools.product(*[range(a, b + 1) for a, b in zip(spec.C, spec.D)])})


def test_sumset_examples():
    spec = rs.SumsetSpec((4, 6), (0, 0), (6, 6))
    assert spec.r == 2
    assert rs.sumset(spec) == plain_sumset(spec)
    res = rs.inclusion_check(spec)
    assert res.inner_window == (6, 24) and res.outer_ok and res.inner_ok
    assert rs.sumset(rs.SumsetSpec((1, 1), (0, 2), (3, 5))) == list(range(2, 9))
    assert rs.sumset(rs.SumsetSpec((3, 3), (0, 0), (3, 3))) == [0, 3, 6, 9, 12, 15, 18]


def test_sumset_window_validation():
    with pytest.raises(ValueError):
        rs.SumsetSpec((4, 6), (0, 0), (5, 6))
    with pytest.raises(ValueError):
        rs.SumsetSpec((4,), (0,), (6,))


@given(seeds)
def test_inclusions_on_random_specs(seed):
    spec = rs.random_sumset_spec(np.random.default_rng(seed))
    assert rs.sumset(spec) == plain_sumset(spec)
    res = rs.inclusion_check(spec)
    assert res.outer_ok and res.inner_ok, (spec, res.missing, res.stray)


def test_chevallier_bound_values():
    assert rs.chevallier_bound((7, 5)) == 11
    assert rs.chevallier_bound((2, 3, 4)) == 13
    assert rs.chevallier_bound((9,)) == 3
    assert gap_count([sqrt_form(2), sqrt_form(3)], geo.unit_box(2), (1, 1)).G == 1


def test_chevallier_fuzz_small_run():
    rep = rs.chevallier_fuzz(40, seed=3)
    assert len(rep.trials) == 40 and not rep.violations
    assert {t.kind for t in rep.trials} >= {"random", "rational_beta"}
    again = rs.chevallier_fuzz(40, seed=3)
    assert rep.to_json() == again.to_json()


def test_decomposition_example():
    rel = RationalBeta(6, (2, 3), (0, 0), sqrt_form(2))
    dec = rs.decompose_S(rs.DecompositionSpec(rel, (50, 40)))
    assert dec.union_ok and dec.direct_ok and not dec.degenerate
    assert dec.S_prime <= dec.S
    assert len(dec.S_second) <= dec.C
    assert dec.ok


def test_decomposition_with_negative_B():
    rel = RationalBeta(4, (3, -2), (Fraction(1, 4), Fraction(1, 2)), sqrt_form(3))
    dec = rs.decompose_S(rs.DecompositionSpec(rel, (33, 29)))
    assert dec.flipped == (1,)
    assert dec.ok


def test_decomposition_rejects_zero_B():
    with pytest.raises(ValueError):
        rs.DecompositionSpec(RationalBeta(3, (0, 1), (0, 0), sqrt_form(2)), (5, 5))


@pytest.mark.parametrize("k", range(50))
def test_decomposition_on_random_specs(k):
    rng = np.random.default_rng([77, k])
    rel = rs.random_relation(rng, int(rng.integers(2, 4)), Q_max=4, B_max=3)
    # every A_i must exceed max |B_j|
    low = rel.Q * (max(map(abs, rel.B)) + 1) + 1
    M = tuple(int(v) for v in rng.integers(low, low + (30 if rel.d == 2 else 8), size=rel.d))
    dec = rs.decompose_S(rs.DecompositionSpec(rel, M))
    assert not dec.degenerate
    assert dec.union_ok and dec.direct_ok
    assert len(dec.S_second) <= dec.C


def test_bounds_and_small_grid_scan():
    rel = RationalBeta.from_affine((Fraction(1, 3), Fraction(1, 5)), (Fraction(1, 2), 0), sqrt_form(2))
    assert rs.C_bound(rel.B, rel.Q) == (2 * 15 + 8) * 4
    assert rs.rational_gap_bound(rel) == 4 + 6 + 1 + 2 * 152
    scan = rs.bounded_gap_scan(rel, 12)
    assert scan.n_runs == 144 and scan.max_G <= scan.bound


def test_full_residues_when_Q_divides_M():
    rel = RationalBeta(6, (2, 3), (0, 0), sqrt_form(2))
    spec = rs.DecompositionSpec(rel, (36, 30))
    assert spec.R == (6, 6) and spec.A == (5, 4)
    assert rs.decompose_S(spec).union_ok
