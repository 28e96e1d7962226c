import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from latticegaps.reals import (
    THETA7,
    THETA7_SQ,
    LinearForm,
    RandomGen,
    SqrtGen,
    certified_sort,
    check_independence,
    set_default_bits,
    sqrt_form,
    squarefree_decompose,
)

from conftest import mp_value

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=60)
radicands = st.sampled_from([2, 3, 5, 6, 7, 10, 11])


@st.composite
def forms(draw):
    c = draw(fracs)
    out = LinearForm.rational(c)
    for s in draw(st.lists(radicands, max_size=3, unique=True)):
        out = out + sqrt_form(s) * draw(fracs)
    return out


def test_squarefree_decompose():
    assert squarefree_decompose(72) == (6, 2)
    assert squarefree_decompose(1) == (1, 1)
    assert squarefree_decompose(30) == (1, 30)


def test_sqrt_form_reduces_radicand():
    assert sqrt_form(8) == 2 * sqrt_form(2)
    assert sqrt_form(Fraction(9, 4)) == Fraction(3, 2)
    assert sqrt_form(Fraction(1, 2)) == sqrt_form(2) / 2


def test_sqrt_products_are_exact():
    assert sqrt_form(2) * sqrt_form(2) == 2
    assert sqrt_form(2) * sqrt_form(3) == sqrt_form(6)


def test_theta_roots_match_cosine():
    mpmath.mp.prec = 300
    theta = 2 * mpmath.cos(2 * mpmath.pi / 7)
    for gen, target in ((THETA7, theta), (THETA7_SQ, theta**2)):
        a = gen.approx(256)
        assert abs(mpmath.mpf(a) / mpmath.mpf(2) ** 256 - target) < mpmath.mpf(2) ** -250


def test_random_generator_is_reproducible_prefix():
    g = RandomGen(17)
    hi = g.approx(256)
    assert hi >> 128 == g.approx(128)
    assert 0 <= float(g) < 1
    assert RandomGen(17) == g and RandomGen(18) != g


@given(forms(), forms())
def test_arithmetic_matches_mpmath(a, b):
    mpmath.mp.prec = 200
    tol = mpmath.mpf(2) ** -150
    assert abs(mp_value(a + b) - (mp_value(a) + mp_value(b))) < tol
    assert abs(mp_value(a - b) - (mp_value(a) - mp_value(b))) < tol
    assert abs(mp_value(a * 3) - 3 * mp_value(a)) < tol


@given(forms())
def test_sign_floor_frac_match_mpmath(a):
    mpmath.mp.prec = 200
    v = mp_value(a)
    if a == 0:
        assert a.sign() == 0
        return
    assert a.sign() == (1 if v > 0 else -1)
    assert a.floor() == int(mpmath.floor(v))
    f = a.frac()
    assert 0 <= f < 1
    assert abs(mp_value(f) - (v - mpmath.floor(v))) < mpmath.mpf(2) ** -150


@given(forms(), forms())
def test_order_is_total_and_consistent(a, b):
    assert (a < b) + (a == b) + (a > b) == 1
    assert (a < b) == ((b - a).sign() > 0)


@given(st.lists(forms(), min_size=2, max_size=12))
def test_certified_sort_agrees_with_mpmath(values):
    out = certified_sort(values)
    nums = [mp_value(v) for v in out]
    assert all(x <= y for x, y in zip(nums, nums[1:]))


def test_equal_values_are_structurally_equal():
    a = sqrt_form(2) + Fraction(1, 3)
    b = (sqrt_form(8) + Fraction(2, 3)) / 2
    assert a == b and hash(a) == hash(b)


def test_independence_screen():
    assert check_independence([SqrtGen(2), SqrtGen(3), SqrtGen(6)]) is None
    assert check_independence([THETA7, THETA7_SQ]) is None
    assert check_independence([RandomGen(1), RandomGen(2)]) is None


def test_precision_floor_is_enforced():
    with pytest.raises(ValueError):
        set_default_bits(32)
    set_default_bits(128)


def test_approx_error_bound():
    x = sqrt_form(2) * Fraction(7, 3) - Fraction(1, 9)
    for p in (64, 128, 300):
        a, e = x.approx(p)
        with mpmath.workprec(p + 64):
            v = (7 * mpmath.sqrt(2) / 3 - mpmath.mpf(1) / 9) * mpmath.mpf(2) ** p
            assert abs(v - a) <= e
    assert math.isclose(float(x), 7 * math.sqrt(2) / 3 - 1 / 9)
