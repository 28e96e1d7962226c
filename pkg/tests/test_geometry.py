import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from latticegaps import geometry as geo
from latticegaps.geometry import AxisBox, Ball, PolytopeH
from latticegaps.reals import LinearForm, sqrt_form

seeds = st.integers(0, 2**32 - 1)


def brute_points(body):
    lo, hi = body.bbox()
    axes = [range(math.floor(a) - 1, math.ceil(b) + 2) for a, b in zip(lo, hi)]
    return sorted(p for p in itertools.product(*axes) if body.contains(p))


def test_unit_box_is_half_open():
    b = geo.unit_box(2)
    assert b.contains((0, 0)) and not b.contains((1, 0)) and not b.contains((Fraction(1, 2), 1))


@given(seeds, st.integers(1, 3))
def test_lattice_points_match_brute_force(seed, d):
    rng = np.random.default_rng(seed)
    body = geo.dilate(geo.random_body(rng, d), (Fraction(int(rng.integers(8, 60)), 8),) * d)
    got = [tuple(int(v) for v in p) for p in geo.lattice_points(body)]
    assert got == brute_points(body)


def test_disk_point_count():
    assert len(geo.lattice_points(Ball((0, 0), 10))) == 317
    assert len(geo.lattice_points(Ball((0, 0), 10, closed=False))) == 317 - 12


@given(seeds, st.integers(1, 3))
def test_interiorize_keeps_points_and_makes_them_interior(seed, d):
    rng = np.random.default_rng(seed)
    body = geo.dilate(geo.random_body(rng, d), (Fraction(int(rng.integers(8, 40)), 8),) * d)
    pts = brute_points(body)
    if not pts:
        return
    inner = geo.interiorize(body)
    assert brute_points(inner) == pts
    assert all(inner.contains_interior(p) for p in pts)


def test_interiorize_ball_radius():
    assert geo.interiorize(Ball((0, 0), 1)).radius == Fraction(9, 8)


@given(seeds)
def test_difference_body_contains_differences(seed):
    rng = np.random.default_rng(seed)
    body = geo.random_body(rng, 2)
    delta = geo.difference_body(body)
    for _ in range(20):
        s = geo.random_interior_point(rng, body, 1000)
        t = geo.random_interior_point(rng, body, 1000)
        assert delta.contains(tuple(a - b for a, b in zip(s, t)))


def test_difference_body_of_half_open_square_is_open():
    delta = geo.difference_body(geo.unit_box(2))
    assert delta.contains((Fraction(99, 100), Fraction(-99, 100)))
    assert not delta.contains((1, 0)) and not delta.contains((0, -1))


def test_difference_body_of_triangle_is_hexagon():
    tri = PolytopeH.from_vertices([(0, 0), (1, 0), (0, 1)])
    assert len(geo.difference_body(tri).vertices) == 6


@given(seeds)
def test_dilation_scales_membership(seed):
    rng = np.random.default_rng(seed)
    body = geo.random_body(rng, 2, kinds=("box", "polygon"))
    T = (Fraction(int(rng.integers(1, 30)), 7), Fraction(int(rng.integers(1, 30)), 7))
    big = geo.dilate(body, T)
    for _ in range(20):
        x = tuple(Fraction(int(v), 64) for v in rng.integers(-64, 65, size=2))
        assert body.contains(x) == big.contains(tuple(a * t for a, t in zip(x, T)))


def test_ball_rejects_non_homothetic_dilation():
    with pytest.raises(geo.GeometryError):
        geo.dilate(Ball((0, 0), 1), (1, 2))


def test_square_direction_and_length():
    u, lam, P = geo.direction_and_length(geo.unit_box(2), (Fraction(4, 5), Fraction(3, 5)))
    assert lam == Fraction(5, 4) and P == (1, Fraction(3, 4))
    with pytest.raises(geo.GeometryError):
        geo.direction_and_length(geo.unit_box(2), (1, 0))


def test_disk_chord_anchor_is_exact():
    anchor = geo.chord_anchor(Ball((0, 0), 1), (1, 0), Fraction(1, 10))
    assert anchor == (LinearForm.rational(Fraction(-1, 20)), -sqrt_form(Fraction(399, 400)))
    anchor = geo.chord_anchor(Ball((0, 0), 1), (1, 0), Fraction(19, 10))
    assert anchor == (LinearForm.rational(Fraction(-19, 20)), -sqrt_form(39) / 20)


@given(seeds, st.floats(0.05, 0.95))
def test_chord_anchor_endpoints_on_boundary(seed, frac):
    rng = np.random.default_rng(seed)
    body = geo.random_body(rng, 2)
    u, lam, _ = geo.direction_and_length(body)
    ell = Fraction(frac).limit_denominator(100) * Fraction(lam) if not isinstance(lam, float) else frac * lam
    t0 = geo.chord_anchor(body, u, ell)
    t1 = tuple(float(a) + float(ell) * float(c) for a, c in zip(t0, u))
    sd = body.signed_distance(np.array([[float(a) for a in t0], t1]))
    assert np.all(np.abs(sd) < 1e-9)


@given(st.integers(2, 4), seeds)
def test_orthonormal_completion(d, seed):
    dirs = list(itertools.islice(geo.stereographic_directions(d), 1 + seed % 7))
    u = dirs[-1]
    basis = np.array([[float(c) for c in v] for v in geo.orthonormal_completion(u)])
    assert np.allclose(basis @ basis.T, np.eye(d))
    assert np.allclose(basis[0], [float(c) for c in u])


@given(seeds)
def test_float_membership_agrees_away_from_boundary(seed):
    rng = np.random.default_rng(seed)
    body = geo.random_body(rng, 2)
    X = rng.uniform(-1, 1, size=(200, 2))
    sd = body.signed_distance(X)
    clear = np.abs(sd) > 1e-6
    exact = np.array([body.contains(tuple(Fraction(float(v)) for v in x)) for x in X])
    assert np.all(body.contains_float(X)[clear] == exact[clear])


@pytest.mark.parametrize("body", [
    AxisBox((0, Fraction(-1, 2)), (1, Fraction(1, 2)), (True, False), (False, True)),
    Ball((Fraction(1, 3), 0), Fraction(1, 2), closed=False),
    PolytopeH.from_vertices([(0, 0), (2, 0), (1, 1)]),
])
def test_json_round_trip(body):
    again = geo.body_from_json(body.to_json())
    pts = [tuple(Fraction(int(a), 8) for a in p) for p in itertools.product(range(-8, 17), repeat=2)]
    assert [body.contains(p) for p in pts] == [again.contains(p) for p in pts]


def test_budget_is_enforced():
    with pytest.raises(geo.BudgetExceeded):
        geo.lattice_points(geo.dilate(geo.unit_box(3), (300, 300, 300)), budget=10**6)
