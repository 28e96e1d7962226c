"""Exact linear forms over a frame of irrational generators, with certified numerics.

A :class:`LinearForm` stores ``(const + sum(c_g * g)) / den`` with integer
coefficients over generators ``g`` that are assumed Q-linearly independent
together with 1.  Equality is structural.  Ordering is decided from
fixed-point approximations whose error is bounded, refining the precision
until the sign is certain.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

DEFAULT_BITS = 128
MAX_BITS = 1 << 14


class CertificationError(ArithmeticError):
    """Raised when a sign cannot be decided within ``MAX_BITS`` of precision."""


def set_default_bits(bits: int) -> None:
    global DEFAULT_BITS
    if bits < 64:
        raise ValueError("precision must be at least 64 bits")
    DEFAULT_BITS = int(bits)


# ---------------------------------------------------------------- generators
#
# Contract for every generator: approx(p) returns an integer a with
# |g * 2**p - a| <= 2.


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return (k, s) with n = k*k*s and s squarefree (n > 0)."""
    if n <= 0:
        raise ValueError("n must be positive")
    k, s, f = 1, 1, 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            k *= f
        if n % f == 0:
            n //= f
            s *= f
        f += 1
    return k, s * n


@lru_cache(maxsize=4096)
def _sqrt_approx(s: int, p: int) -> int:
    return math.isqrt(s << (2 * p))


@dataclass(frozen=True)
class SqrtGen:
    """The square root of a squarefree integer s > 1."""

    s: int

    def __post_init__(self):
        if self.s < 2 or squarefree_decompose(self.s)[0] != 1:
            raise ValueError(f"sqrt generator needs a squarefree integer > 1, got {self.s}")

    @property
    def key(self) -> str:
        return f"sqrt{self.s}"

    def approx(self, p: int) -> int:
        return _sqrt_approx(self.s, p)

    def __float__(self) -> float:
        return math.sqrt(self.s)


def _poly_sign(coeffs: tuple[int, ...], a: int, p: int) -> int:
    # sign of sum c_i x^(n-i) at x = a / 2**p, coefficients highest degree first
    n = len(coeffs) - 1
    acc = 0
    for i, c in enumerate(coeffs):
        acc += c * a ** (n - i) * (1 << (p * i))
    return (acc > 0) - (acc < 0)


@lru_cache(maxsize=1024)
def _root_approx(coeffs: tuple[int, ...], lo: Fraction, hi: Fraction, p: int) -> int:
    a = math.floor(lo * (1 << p))
    b = math.ceil(hi * (1 << p))
    sa = _poly_sign(coeffs, a, p)
    sb = _poly_sign(coeffs, b, p)
    if sa == 0:
        return a
    if sb == 0:
        return b
    if sa == sb:
        raise ValueError("isolating interval does not bracket a simple root")
    while b - a > 1:
        c = (a + b) // 2
        sc = _poly_sign(coeffs, c, p)
        if sc == 0:
            return c
        if sc == sa:
            a = c
        else:
            b = c
    return a


@dataclass(frozen=True)
class RootGen:
    """A simple real root of an integer polynomial, isolated in [lo, hi]."""

    name: str
    coeffs: tuple[int, ...]
    lo: Fraction
    hi: Fraction

    @property
    def key(self) -> str:
        return f"root:{self.name}"

    def approx(self, p: int) -> int:
        return _root_approx(self.coeffs, self.lo, self.hi, p)

    def __float__(self) -> float:
        return self.approx(64) / 2.0**64


@lru_cache(maxsize=4096)
def _random_chunks(seed: int, n: int) -> int:
    rng = random.Random(seed)
    acc = 0
    for _ in range(n):
        acc = (acc << 64) | rng.getrandbits(64)
    return acc


@dataclass(frozen=True)
class RandomGen:
    """A uniformly random real in [0, 1) whose binary digits come from a seeded stream.

    Any finite prefix is reproducible from the seed, so the number can be
    refined to arbitrary precision; with probability one it is independent
    of every other generator.
    """

    seed: int

    @property
    def key(self) -> str:
        return f"rand:{self.seed}"

    def approx(self, p: int) -> int:
        n = -(-p // 64)
        return _random_chunks(self.seed, n) >> (64 * n - p)

    def __float__(self) -> float:
        return self.approx(64) / 2.0**64


# θ = 2cos(2π/7) is the root of x^3 + x^2 - 2x - 1 in (1.24, 1.25); θ² is the
# root of x^3 - 5x^2 + 6x - 1 in (1.55, 1.56).
THETA7 = RootGen("theta7", (1, 1, -2, -1), Fraction(124, 100), Fraction(125, 100))
THETA7_SQ = RootGen("theta7sq", (1, -5, 6, -1), Fraction(155, 100), Fraction(156, 100))


# ---------------------------------------------------------------- interval helper

class Interval:
    """Closed interval with rational endpoints, enough for certified quadratics."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        self.lo = Fraction(lo)
        self.hi = Fraction(lo if hi is None else hi)

    def __add__(self, o):
        o = o if isinstance(o, Interval) else Interval(o)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, o):
        o = o if isinstance(o, Interval) else Interval(o)
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __mul__(self, o):
        o = o if isinstance(o, Interval) else Interval(o)
        c = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(c), max(c))

    __rmul__ = __mul__

    def square(self) -> "Interval":
        if self.lo >= 0:
            return Interval(self.lo**2, self.hi**2)
        if self.hi <= 0:
            return Interval(self.hi**2, self.lo**2)
        return Interval(0, max(self.lo**2, self.hi**2))

    def __repr__(self):
        return f"Interval({float(self.lo)!r}, {float(self.hi)!r})"


# ---------------------------------------------------------------- linear forms

Rational = int | Fraction


def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


class LinearForm:
    """Exact value ``(const + sum(c * g)) / den`` over independent generators."""

    __slots__ = ("const", "terms", "den")

    def __init__(self, const: int = 0, terms: Iterable[tuple[object, int]] = (), den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        items: dict = {}
        for g, c in terms:
            if c:
                items[g] = items.get(g, 0) + c
        items = {g: c for g, c in items.items() if c}
        if den < 0:
            den, const = -den, -const
            items = {g: -c for g, c in items.items()}
        q = math.gcd(den, const, *items.values())
        if q > 1:
            den //= q
            const //= q
            items = {g: c // q for g, c in items.items()}
        self.const = const
        self.den = den
        self.terms = tuple(sorted(items.items(), key=lambda gc: gc[0].key))

    # constructors -----------------------------------------------------
    @classmethod
    def rational(cls, x: Rational) -> "LinearForm":
        x = Fraction(x)
        return cls(x.numerator, (), x.denominator)

    @classmethod
    def generator(cls, g, coeff: Rational = 1) -> "LinearForm":
        c = Fraction(coeff)
        return cls(0, ((g, c.numerator),), c.denominator)

    @classmethod
    def coerce(cls, x) -> "LinearForm":
        if isinstance(x, LinearForm):
            return x
        if _is_rational(x):
            return cls.rational(x)
        raise TypeError(f"cannot convert {type(x).__name__} to an exact linear form")

    # structure --------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return not self.terms

    def to_fraction(self) -> Fraction:
        if self.terms:
            raise ValueError("form is irrational")
        return Fraction(self.const, self.den)

    @property
    def generators(self) -> tuple:
        return tuple(g for g, _ in self.terms)

    def coefficient(self, g) -> Fraction:
        for h, c in self.terms:
            if h == g:
                return Fraction(c, self.den)
        return Fraction(0)

    def coeffs(self, frame: Sequence) -> list[Fraction]:
        """Coefficients (c0, c_g for g in frame) as fractions."""
        d = dict(self.terms)
        extra = set(d) - set(frame)
        if extra:
            raise ValueError(f"frame misses generators {[g.key for g in extra]}")
        return [Fraction(self.const, self.den)] + [Fraction(d.get(g, 0), self.den) for g in frame]

    def _key(self):
        return (self.const, self.den, self.terms)

    def __eq__(self, other):
        if isinstance(other, LinearForm):
            return self._key() == other._key()
        if _is_rational(other):
            return not self.terms and Fraction(self.const, self.den) == other
        return NotImplemented

    def __hash__(self):
        if not self.terms:
            return hash(Fraction(self.const, self.den))
        return hash(self._key())

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, LinearForm):
            if not _is_rational(other):
                return NotImplemented
            other = LinearForm.rational(other)
        d1, d2 = self.den, other.den
        terms = [(g, c * d2) for g, c in self.terms] + [(g, c * d1) for g, c in other.terms]
        return LinearForm(self.const * d2 + other.const * d1, terms, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return LinearForm(-self.const, [(g, -c) for g, c in self.terms], self.den)

    def __sub__(self, other):
        if not isinstance(other, LinearForm) and not _is_rational(other):
            return NotImplemented
        return self + (-LinearForm.coerce(other))

    def __rsub__(self, other):
        return LinearForm.coerce(other) - self

    def __mul__(self, other):
        if _is_rational(other):
            f = Fraction(other)
            return LinearForm(self.const * f.numerator,
                              [(g, c * f.numerator) for g, c in self.terms],
                              self.den * f.denominator)
        if isinstance(other, LinearForm):
            if other.is_rational:
                return self * other.to_fraction()
            if self.is_rational:
                return other * self.to_fraction()
            return _sqrt_product(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LinearForm):
            other = other.to_fraction()
        if not _is_rational(other):
            return NotImplemented
        return self * (1 / Fraction(other))

    # numerics ---------------------------------------------------------
    def approx(self, p: int) -> tuple[int, int]:
        """Integers (a, e) with |value * 2**p - a| <= e."""
        s = self.const << p
        err = 0
        for g, c in self.terms:
            s += c * g.approx(p)
            err += 2 * abs(c)
        a = s // self.den
        e = -(-err // self.den) + 1
        return a, e

    def interval(self, p: int | None = None) -> Interval:
        if not self.terms:
            return Interval(Fraction(self.const, self.den))
        p = DEFAULT_BITS if p is None else p
        a, e = self.approx(p)
        return Interval(Fraction(a - e, 1 << p), Fraction(a + e, 1 << p))

    def sign(self) -> int:
        if not self.terms:
            return (self.const > 0) - (self.const < 0)
        p = DEFAULT_BITS
        while p <= MAX_BITS:
            a, e = self.approx(p)
            if a > e:
                return 1
            if a < -e:
                return -1
            p *= 2
        raise CertificationError(f"sign undecided at {MAX_BITS} bits for {self!r}")

    def floor(self) -> int:
        if not self.terms:
            return self.const // self.den
        p = DEFAULT_BITS
        while p <= MAX_BITS:
            a, e = self.approx(p)
            lo, hi = (a - e) >> p, (a + e) >> p
            if lo == hi:
                return lo
            p *= 2
        raise CertificationError(f"floor undecided at {MAX_BITS} bits for {self!r}")

    def frac(self) -> "LinearForm":
        return self - self.floor()

    def __float__(self) -> float:
        if not self.terms:
            return self.const / self.den
        a, _ = self.approx(64)
        return a / 2**64

    def _cmp(self, other) -> int:
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __repr__(self):
        parts = [str(self.const)] + [f"{c}*{g.key}" for g, c in self.terms]
        s = " + ".join(parts)
        return f"LinearForm(({s})/{self.den})" if self.den != 1 else f"LinearForm({s})"

    def to_json(self):
        """Plain serialisable form: {"const": "p/q", "terms": {key: "p/q"}}."""
        return {
            "const": str(Fraction(self.const, self.den)),
            "terms": {g.key: str(Fraction(c, self.den)) for g, c in self.terms},
        }


def _sqrt_product(a: LinearForm, b: LinearForm) -> LinearForm:
    # closed only when every generator is a square root
    for g, _ in a.terms + b.terms:
        if not isinstance(g, SqrtGen):
            raise TypeError("product of irrational forms is only exact over square roots")
    a_items = [(1, a.const)] + [(g.s, c) for g, c in a.terms]
    b_items = [(1, b.const)] + [(g.s, c) for g, c in b.terms]
    const = 0
    terms = []
    for s, ca in a_items:
        for t, cb in b_items:
            g = math.gcd(s, t)
            rest = (s // g) * (t // g)
            coef = ca * cb * g
            if rest == 1:
                const += coef
            else:
                terms.append((SqrtGen(rest), coef))
    return LinearForm(const, terms, a.den * b.den)


def sqrt_form(x: Rational) -> LinearForm:
    """Exact square root of a non-negative rational as a linear form."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative radicand")
    if x == 0:
        return LinearForm.rational(0)
    # sqrt(p/q) = sqrt(p*q)/q
    k, s = squarefree_decompose(x.numerator * x.denominator)
    if s == 1:
        return LinearForm.rational(Fraction(k, x.denominator))
    return LinearForm.generator(SqrtGen(s), Fraction(k, x.denominator))


def as_exact(x):
    """Return a LinearForm for ints, Fractions and LinearForms; None otherwise."""
    if isinstance(x, LinearForm):
        return x
    if _is_rational(x):
        return LinearForm.rational(x)
    return None


def frame_of(values: Iterable[LinearForm]) -> tuple:
    gens = {}
    for v in values:
        for g, _ in v.terms:
            gens[g.key] = g
    return tuple(gens[k] for k in sorted(gens))


def dense(values: Sequence[LinearForm], frame: Sequence | None = None):
    """Integer matrix form of a list of forms over a common frame and denominator.

    Returns ``(frame, num, den)`` with ``num`` a list of integer rows
    ``(c0, c_g...)`` so that ``values[i] = (num[i] . (1, g...)) / den``.
    """
    frame = tuple(frame) if frame is not None else frame_of(values)
    index = {g: i + 1 for i, g in enumerate(frame)}
    den = 1
    for v in values:
        den = den * v.den // math.gcd(den, v.den)
    rows = []
    for v in values:
        scale = den // v.den
        row = [0] * (len(frame) + 1)
        row[0] = v.const * scale
        for g, c in v.terms:
            row[index[g]] = c * scale
        rows.append(row)
    return frame, rows, den


def form_from_row(frame: Sequence, row: Sequence[int], den: int) -> LinearForm:
    return LinearForm(int(row[0]), [(g, int(c)) for g, c in zip(frame, row[1:])], int(den))


def combo_sign(frame: Sequence, row: Sequence[int]) -> int:
    """Certified sign of ``row[0] + sum(row[j+1] * frame[j])`` (integers)."""
    return form_from_row(frame, row, 1).sign()


def frame_approx(frame: Sequence, p: int) -> list[int]:
    return [g.approx(p) for g in frame]


def certified_sort(values: Sequence[LinearForm]) -> list[LinearForm]:
    """Sort exact forms by value; float keys first, exact comparison where close."""
    import functools

    def cmp(a, b):
        fa, fb = float(a), float(b)
        if abs(fa - fb) > 1e-9 * (1 + abs(fa) + abs(fb)):
            return -1 if fa < fb else 1
        if a == b:
            return 0
        return a._cmp(b)

    return sorted(values, key=functools.cmp_to_key(cmp))


def check_independence(gens: Sequence, digits: int = 50, maxcoeff: int = 10**4):
    """Search for a small integer relation among 1 and the generators.

    Returns the relation found (a list of integers) or None.  This is a
    heuristic screen: absence of a small relation is not a proof.
    """
    import mpmath

    if not gens:
        return None
    bits = int(digits * 3.33) + 16
    with mpmath.workdps(digits):
        vec = [mpmath.mpf(1)] + [mpmath.mpf(g.approx(bits)) / mpmath.mpf(2) ** bits for g in gens]
        rel = mpmath.pslq(vec, maxcoeff=maxcoeff, maxsteps=10**4)
    return rel
