from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def mp_value(x, bits=200):
    """An mpmath number for an exact form or a rational, computed independently
    from the generator definitions (sqrt, polynomial roots, seeded digits)."""
    from latticegaps.reals import LinearForm, RandomGen, RootGen, SqrtGen

    with mpmath.workprec(bits):
        if isinstance(x, Fraction) or isinstance(x, int):
            return mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x)
        total = mpmath.mpf(x.const)
        for g, c in x.terms:
            if isinstance(g, SqrtGen):
                v = mpmath.sqrt(g.s)
            elif isinstance(g, RootGen):
                coeffs = [int(c_) for c_ in g.coeffs]
                mid = (Fraction(g.lo) + Fraction(g.hi)) / 2
                v = mpmath.findroot(lambda t: mpmath.polyval(coeffs, t), mpmath.mpf(mid.numerator) / mid.denominator)
            elif isinstance(g, RandomGen):
                v = mpmath.mpf(g.approx(bits + 8)) / mpmath.mpf(2) ** (bits + 8)
            else:
                raise TypeError(g)
            total += c * v
        return total / x.den


def mp_gap_count(alpha, pts, bits=200):
    """Distinct gaps of {m.alpha mod 1} by plain high-precision arithmetic."""
    with mpmath.workprec(bits):
        a = [mp_value(v, bits) for v in alpha]
        tol = mpmath.mpf(2) ** (-bits // 2)
        raw = []
        for m in pts:
            v = mpmath.frac(sum(int(c) * x for c, x in zip(m, a)))
            raw.append(mpmath.mpf(0) if 1 - v < tol else v)
        vals = []
        for v in sorted(raw):
            if not vals or v - vals[-1] > tol:
                vals.append(v)
        gaps = [vals[i + 1] - vals[i] for i in range(len(vals) - 1)] + [vals[0] + 1 - vals[-1]]
        distinct = []
        for g in sorted(gaps):
            if not distinct or g - distinct[-1] > tol:
                distinct.append(g)
        return len(distinct), len(vals)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
