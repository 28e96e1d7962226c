"""Convex bodies with exact open/closed faces, dilations, difference bodies,
lattice-point enumeration and the chord constructions used to build the
lattices on which the gap function takes prescribed values."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .reals import (
    CertificationError,
    Interval,
    LinearForm,
    SqrtGen,
    as_exact,
    sqrt_form,
)

DEFAULT_BUDGET = 10**7

# (T_1, ..., T_d), all positive; homothetic R is (R,) * d
DiagDilation = tuple[Fraction, ...]


class BudgetExceeded(RuntimeError):
    """Enumeration would visit more candidates than the configured cap."""


class GeometryError(ValueError):
    pass


def to_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a number")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, LinearForm) and x.is_rational:
        return x.to_fraction()
    raise TypeError(f"not a rational: {x!r}")


def rvec(xs) -> tuple[Fraction, ...]:
    return tuple(to_rational(x) for x in xs)


def _kind(x) -> str:
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return "rational"
    if isinstance(x, LinearForm):
        return "rational" if x.is_rational else "form"
    return "float"


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _int_array(rows) -> np.ndarray:
    arr = np.array(rows, dtype=object)
    try:
        big = max((abs(int(v)) for v in arr.flat), default=0)
    except ValueError:
        big = 0
    if big < 2**62:
        return arr.astype(np.int64)
    return arr


class ConvexBody:
    """Base class.  Subclasses are immutable and compare by value."""

    dim: int

    # -- membership --------------------------------------------------
    def contains(self, x) -> bool:
        x = tuple(x)
        if len(x) != self.dim:
            raise GeometryError(f"dimension mismatch: body is {self.dim}-d, point is {len(x)}-d")
        kinds = {_kind(v) for v in x}
        if kinds <= {"rational"}:
            return self._contains_rational(tuple(to_rational(v) for v in x))
        if "float" in kinds:
            return bool(self.contains_float(np.array([[float(v) for v in x]]))[0])
        return self._contains_form(tuple(LinearForm.coerce(v) for v in x))

    def contains_interior(self, x) -> bool:
        return self.interior().contains(x)

    def contains_int(self, pts: np.ndarray) -> np.ndarray:
        """Exact membership for an (n, d) integer array."""
        raise NotImplementedError

    def contains_float(self, X: np.ndarray, margin: float = 0.0) -> np.ndarray:
        """Float membership of an (n, d) array, enlarged by ``margin``."""
        raise NotImplementedError

    # -- structure ---------------------------------------------------
    def bbox(self) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        raise NotImplementedError

    def interior(self) -> "ConvexBody":
        """The open body with the same closure."""
        raise NotImplementedError

    def closure(self) -> "ConvexBody":
        raise NotImplementedError

    def interior_point(self) -> tuple[Fraction, ...]:
        raise NotImplementedError

    def signed_distance(self, X: np.ndarray) -> np.ndarray:
        """Negative inside; for points outside a lower bound on the distance."""
        raise NotImplementedError

    def affine(self, scale, shift) -> "ConvexBody":
        """Image under x -> scale * x + shift (scale a non-zero rational)."""
        raise NotImplementedError

    def translate(self, v) -> "ConvexBody":
        return self.affine(1, v)

    def bounding_radius(self) -> float:
        lo, hi = self.bbox()
        return math.sqrt(sum(max(abs(float(a)), abs(float(b))) ** 2 for a, b in zip(lo, hi)))

    def to_json(self) -> dict:
        raise NotImplementedError


# ---------------------------------------------------------------- axis box

@dataclass(frozen=True)
class AxisBox(ConvexBody):
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]
    lo_closed: tuple[bool, ...] = None
    hi_closed: tuple[bool, ...] = None

    def __post_init__(self):
        object.__setattr__(self, "lo", rvec(self.lo))
        object.__setattr__(self, "hi", rvec(self.hi))
        d = len(self.lo)
        if d == 0 or len(self.hi) != d:
            raise GeometryError("lo and hi must be non-empty and of equal length")
        if any(a >= b for a, b in zip(self.lo, self.hi)):
            raise GeometryError("AxisBox needs lo < hi componentwise")
        if self.lo_closed is None:
            object.__setattr__(self, "lo_closed", (True,) * d)
        if self.hi_closed is None:
            object.__setattr__(self, "hi_closed", (False,) * d)
        object.__setattr__(self, "lo_closed", tuple(bool(f) for f in self.lo_closed))
        object.__setattr__(self, "hi_closed", tuple(bool(f) for f in self.hi_closed))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def widths(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    def _contains_rational(self, x):
        for v, a, b, ca, cb in zip(x, self.lo, self.hi, self.lo_closed, self.hi_closed):
            if v < a or (v == a and not ca):
                return False
            if v > b or (v == b and not cb):
                return False
        return True

    def _contains_form(self, x):
        for v, a, b, ca, cb in zip(x, self.lo, self.hi, self.lo_closed, self.hi_closed):
            s = (v - a).sign()
            if s < 0 or (s == 0 and not ca):
                return False
            s = (v - b).sign()
            if s > 0 or (s == 0 and not cb):
                return False
        return True

    def int_ranges(self) -> list[tuple[int, int]]:
        out = []
        for a, b, ca, cb in zip(self.lo, self.hi, self.lo_closed, self.hi_closed):
            first = math.ceil(a) if ca else math.floor(a) + 1
            last = math.floor(b) if cb else math.ceil(b) - 1
            out.append((first, last))
        return out

    def contains_int(self, pts):
        pts = np.asarray(pts)
        ok = np.ones(len(pts), dtype=bool)
        for i, (first, last) in enumerate(self.int_ranges()):
            ok &= (pts[:, i] >= first) & (pts[:, i] <= last)
        return ok

    def contains_float(self, X, margin=0.0):
        lo = np.array([float(a) for a in self.lo]) - margin
        hi = np.array([float(b) for b in self.hi]) + margin
        return np.all((X >= lo) & (X <= hi), axis=1)

    def bbox(self):
        return self.lo, self.hi

    def interior(self):
        return AxisBox(self.lo, self.hi, (False,) * self.dim, (False,) * self.dim)

    def closure(self):
        return AxisBox(self.lo, self.hi, (True,) * self.dim, (True,) * self.dim)

    def interior_point(self):
        return tuple((a + b) / 2 for a, b in zip(self.lo, self.hi))

    def signed_distance(self, X):
        lo = np.array([float(a) for a in self.lo])
        hi = np.array([float(b) for b in self.hi])
        below = lo - X
        above = X - hi
        outside = np.maximum(np.maximum(below, above), 0.0)
        out_dist = np.sqrt((outside**2).sum(axis=1))
        in_dist = np.max(np.maximum(below, above), axis=1)
        return np.where(out_dist > 0, out_dist, in_dist)

    def affine(self, scale, shift):
        s = to_rational(scale)
        shift = rvec(shift)
        if s == 0:
            raise GeometryError("degenerate scale")
        lo = tuple(s * a + t for a, t in zip(self.lo, shift))
        hi = tuple(s * b + t for b, t in zip(self.hi, shift))
        if s > 0:
            return AxisBox(lo, hi, self.lo_closed, self.hi_closed)
        return AxisBox(hi, lo, self.hi_closed, self.lo_closed)

    def to_json(self):
        return {
            "shape": "box",
            "lo": [str(a) for a in self.lo],
            "hi": [str(b) for b in self.hi],
            "lo_closed": list(self.lo_closed),
            "hi_closed": list(self.hi_closed),
        }


# ---------------------------------------------------------------- ball

@dataclass(frozen=True)
class Ball(ConvexBody):
    center: tuple[Fraction, ...]
    radius: Fraction
    closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "center", rvec(self.center))
        object.__setattr__(self, "radius", to_rational(self.radius))
        if self.radius <= 0:
            raise GeometryError("radius must be positive")
        if not 1 <= len(self.center) <= 4:
            raise GeometryError("balls are supported for 1 <= d <= 4")

    @property
    def dim(self):
        return len(self.center)

    def _cmp_radius(self, q) -> bool:
        r2 = self.radius**2
        return q < r2 or (self.closed and q == r2)

    def _contains_rational(self, x):
        return self._cmp_radius(sum((v - c) ** 2 for v, c in zip(x, self.center)))

    def _contains_form(self, x):
        diffs = [v - c for v, c in zip(x, self.center)]
        gens = {g for v in diffs for g, _ in v.terms}
        if all(isinstance(g, SqrtGen) for g in gens):
            q = sum((v * v for v in diffs), LinearForm.rational(0)) - self.radius**2
            s = q.sign()
            return s < 0 or (s == 0 and self.closed)
        from . import reals

        p = reals.DEFAULT_BITS
        r2 = self.radius**2
        while p <= reals.MAX_BITS:
            q = Interval(0)
            for v in diffs:
                q = q + v.interval(p).square()
            if q.hi < r2:
                return True
            if q.lo > r2:
                return False
            p *= 2
        raise CertificationError("ball membership undecided (point on the sphere?)")

    def _scaled(self):
        L = _lcm([c.denominator for c in self.center] + [self.radius.denominator])
        cen = [int(c * L) for c in self.center]
        return L, cen, int(self.radius * L) ** 2

    def contains_int(self, pts):
        pts = np.asarray(pts)
        L, cen, r2 = self._scaled()
        big = (np.abs(pts).max(initial=0) + max(abs(c) for c in cen) // L + 1) * L
        if big * big * self.dim < 2**62 and r2 < 2**62:
            diff = pts.astype(np.int64) * L - np.array(cen, dtype=np.int64)
            q = (diff * diff).sum(axis=1)
        else:
            diff = pts.astype(object) * L - np.array(cen, dtype=object)
            q = (diff * diff).sum(axis=1)
        ok = (q <= r2) if self.closed else (q < r2)
        return np.asarray(ok, dtype=bool)

    def contains_float(self, X, margin=0.0):
        c = np.array([float(v) for v in self.center])
        return np.sqrt(((X - c) ** 2).sum(axis=1)) <= float(self.radius) + margin

    def bbox(self):
        return (tuple(c - self.radius for c in self.center), tuple(c + self.radius for c in self.center))

    def interior(self):
        return Ball(self.center, self.radius, False)

    def closure(self):
        return Ball(self.center, self.radius, True)

    def interior_point(self):
        return self.center

    def signed_distance(self, X):
        c = np.array([float(v) for v in self.center])
        return np.sqrt(((X - c) ** 2).sum(axis=1)) - float(self.radius)

    def affine(self, scale, shift):
        s = to_rational(scale)
        if s == 0:
            raise GeometryError("degenerate scale")
        return Ball(tuple(s * c + t for c, t in zip(self.center, rvec(shift))), abs(s) * self.radius, self.closed)

    def bounding_radius(self):
        return math.sqrt(sum(float(c) ** 2 for c in self.center)) + float(self.radius)

    def to_json(self):
        return {"shape": "ball", "center": [str(c) for c in self.center], "radius": str(self.radius), "closed": self.closed}


# ---------------------------------------------------------------- polytope (d = 2)

@dataclass(frozen=True)
class HalfPlane:
    a: tuple[Fraction, ...]
    b: Fraction
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "a", rvec(self.a))
        object.__setattr__(self, "b", to_rational(self.b))
        if all(v == 0 for v in self.a):
            raise GeometryError("half-plane with zero normal")


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points) -> list[tuple[Fraction, Fraction]]:
    """Exact monotone-chain hull, counter-clockwise, no collinear points."""
    pts = sorted(set(tuple(rvec(p)) for p in points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _hull_halfplanes(verts) -> tuple[HalfPlane, ...]:
    hps = []
    n = len(verts)
    for i in range(n):
        p, q = verts[i], verts[(i + 1) % n]
        # counter-clockwise: interior on the left, outward normal (dy, -dx)
        a = (q[1] - p[1], p[0] - q[0])
        b = a[0] * p[0] + a[1] * p[1]
        hps.append(HalfPlane(a, b, False))
    return tuple(hps)


@dataclass(frozen=True)
class PolytopeH(ConvexBody):
    """Intersection of half-planes a.x <= b (or < b when strict), in d = 2."""

    halfplanes: tuple[HalfPlane, ...]
    _vertices: tuple = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        hps = tuple(h if isinstance(h, HalfPlane) else HalfPlane(*h) for h in self.halfplanes)
        object.__setattr__(self, "halfplanes", hps)
        if any(len(h.a) != 2 for h in hps):
            raise GeometryError("polytopes are supported in d = 2 only")
        verts = self._compute_vertices()
        if len(verts) < 3:
            raise GeometryError("polytope is unbounded, empty or has empty interior")
        object.__setattr__(self, "_vertices", tuple(verts))

    @classmethod
    def from_vertices(cls, vertices) -> "PolytopeH":
        hull = convex_hull_2d(vertices)
        if len(hull) < 3:
            raise GeometryError("vertices span no area")
        return cls(_hull_halfplanes(hull))

    @property
    def dim(self):
        return 2

    def _compute_vertices(self):
        hps = self.halfplanes
        cands = set()
        for h1, h2 in itertools.combinations(hps, 2):
            det = h1.a[0] * h2.a[1] - h1.a[1] * h2.a[0]
            if det == 0:
                continue
            x = (h1.b * h2.a[1] - h2.b * h1.a[1]) / det
            y = (h1.a[0] * h2.b - h2.a[0] * h1.b) / det
            if all(h.a[0] * x + h.a[1] * y <= h.b for h in hps):
                cands.add((x, y))
        hull = convex_hull_2d(cands)
        # boundedness: every direction must be blocked; check via the recession cone
        if len(hull) >= 3:
            for v in [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]:
                if all(h.a[0] * v[0] + h.a[1] * v[1] <= 0 for h in hps):
                    return []
        return hull

    @property
    def vertices(self) -> tuple[tuple[Fraction, Fraction], ...]:
        return self._vertices

    def edges(self):
        v = self._vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def _contains_rational(self, x):
        for h in self.halfplanes:
            s = h.a[0] * x[0] + h.a[1] * x[1]
            if s > h.b or (h.strict and s == h.b):
                return False
        return True

    def _contains_form(self, x):
        for h in self.halfplanes:
            s = (x[0] * h.a[0] + x[1] * h.a[1] - h.b).sign()
            if s > 0 or (h.strict and s == 0):
                return False
        return True

    def contains_int(self, pts):
        pts = np.asarray(pts).astype(object)
        ok = np.ones(len(pts), dtype=bool)
        for h in self.halfplanes:
            L = _lcm([v.denominator for v in h.a] + [h.b.denominator])
            a0, a1, b = int(h.a[0] * L), int(h.a[1] * L), int(h.b * L)
            s = pts[:, 0] * a0 + pts[:, 1] * a1
            ok &= np.array([(v < b) if h.strict else (v <= b) for v in s], dtype=bool)
        return ok

    def contains_float(self, X, margin=0.0):
        ok = np.ones(len(X), dtype=bool)
        for h in self.halfplanes:
            a = np.array([float(v) for v in h.a])
            ok &= X @ a <= float(h.b) + margin * np.linalg.norm(a)
        return ok

    def bbox(self):
        xs = [v[0] for v in self._vertices]
        ys = [v[1] for v in self._vertices]
        return (min(xs), min(ys)), (max(xs), max(ys))

    def interior(self):
        return PolytopeH(tuple(HalfPlane(h.a, h.b, True) for h in self.halfplanes))

    def closure(self):
        return PolytopeH(tuple(HalfPlane(h.a, h.b, False) for h in self.halfplanes))

    def interior_point(self):
        v = self._vertices
        return (sum(p[0] for p in v) / len(v), sum(p[1] for p in v) / len(v))

    def signed_distance(self, X):
        out = np.full(len(X), -np.inf)
        for h in self.halfplanes:
            a = np.array([float(v) for v in h.a])
            out = np.maximum(out, (X @ a - float(h.b)) / np.linalg.norm(a))
        return out

    def affine(self, scale, shift):
        s = to_rational(scale)
        t = rvec(shift)
        if s == 0:
            raise GeometryError("degenerate scale")
        # y = s x + t  <=>  x = (y - t)/s ; a.x <= b  <=>  (a/s).y <= b + a.t/s
        hps = []
        for h in self.halfplanes:
            a = tuple(v / s for v in h.a)
            b = h.b + (h.a[0] * t[0] + h.a[1] * t[1]) / s
            hps.append(HalfPlane(a, b, h.strict))
        return PolytopeH(tuple(hps))

    def to_json(self):
        return {
            "shape": "polytope",
            "halfplanes": [{"a": [str(v) for v in h.a], "b": str(h.b), "strict": h.strict} for h in self.halfplanes],
        }


# ---------------------------------------------------------------- construction / IO

def unit_box(d: int) -> AxisBox:
    """The half-open unit cube [0, 1)^d."""
    return AxisBox((0,) * d, (1,) * d)


def _rand_frac(rng, lo, hi, den: int = 64) -> Fraction:
    return Fraction(int(rng.integers(round(lo * den), round(hi * den) + 1)), den)


def random_body(rng, d: int, size=1, kinds=("box", "ball", "polygon")) -> ConvexBody:
    """A random body near the origin with rational data and extent about size."""
    size = to_rational(size)
    kinds = [k for k in kinds if k == "box" or d == 2 or (k == "ball" and d <= 4)]
    kind = str(rng.choice(kinds))
    if kind == "ball":
        c = tuple(_rand_frac(rng, -0.1, 0.1) * size for _ in range(d))
        return Ball(c, _rand_frac(rng, 0.3, 0.5) * size, bool(rng.random() < 0.5))
    if kind == "polygon":
        while True:
            ang = np.sort(rng.random(int(rng.integers(3, 7))) * 2 * math.pi)
            rad = 0.25 + 0.25 * rng.random(len(ang))
            verts = [(Fraction(float(r * math.cos(a))).limit_denominator(64) * size,
                      Fraction(float(r * math.sin(a))).limit_denominator(64) * size) for r, a in zip(rad, ang)]
            if len(convex_hull_2d(verts)) >= 3:
                body = PolytopeH.from_vertices(verts)
                if body.contains_interior((0, 0)):
                    return body
    lo = tuple(-_rand_frac(rng, 0.2, 0.5) * size for _ in range(d))
    hi = tuple(a + _rand_frac(rng, 0.5, 1.0) * size for a in lo)
    closed = [bool(v) for v in rng.random(2 * d) < 0.5]
    return AxisBox(lo, hi, tuple(closed[:d]), tuple(closed[d:]))


def random_interior_point(rng, body: ConvexBody, den: int = 10**6) -> tuple[Fraction, ...]:
    lo, hi = body.bbox()
    inner = body.interior()
    for _ in range(10000):
        t = tuple(a + (b - a) * Fraction(int(rng.integers(1, den)), den) for a, b in zip(lo, hi))
        if inner.contains(t):
            return t
    raise GeometryError("could not sample an interior point")


def body_from_json(obj: dict) -> ConvexBody:
    shape = obj.get("shape")
    if shape == "box":
        lo = obj["lo"]
        return AxisBox(lo, obj["hi"], obj.get("lo_closed"), obj.get("hi_closed"))
    if shape == "ball":
        return Ball(obj["center"], obj["radius"], obj.get("closed", True))
    if shape == "polytope":
        if "vertices" in obj:
            return PolytopeH.from_vertices(obj["vertices"])
        return PolytopeH(tuple(HalfPlane(h["a"], h["b"], h.get("strict", False)) for h in obj["halfplanes"]))
    raise GeometryError(f"unknown shape {shape!r}")


# ---------------------------------------------------------------- operations

def contains(body: ConvexBody, x) -> bool:
    return body.contains(x)


def dilate(body: ConvexBody, T) -> ConvexBody:
    """D_T = {xT : x in D} for T = diag(T_1..T_d), T_i > 0."""
    T = rvec(T)
    if len(T) != body.dim:
        raise GeometryError("dilation factors do not match the body dimension")
    if any(t <= 0 for t in T):
        raise GeometryError("dilation factors must be positive")
    if isinstance(body, AxisBox):
        return AxisBox(tuple(a * t for a, t in zip(body.lo, T)),
                       tuple(b * t for b, t in zip(body.hi, T)),
                       body.lo_closed, body.hi_closed)
    if isinstance(body, Ball):
        if len(set(T)) != 1:
            raise GeometryError("non-homothetic dilation of a ball is not supported (would be an ellipsoid)")
        return body.affine(T[0], (0,) * body.dim)
    if isinstance(body, PolytopeH):
        return PolytopeH(tuple(HalfPlane((h.a[0] / T[0], h.a[1] / T[1]), h.b, h.strict) for h in body.halfplanes))
    raise GeometryError(f"unsupported body {type(body).__name__}")


def difference_body(body: ConvexBody) -> ConvexBody:
    """Delta D = {s - t : s, t in D}."""
    if isinstance(body, AxisBox):
        w = body.widths
        flags = tuple(a and b for a, b in zip(body.lo_closed, body.hi_closed))
        return AxisBox(tuple(-v for v in w), w, flags, flags)
    if isinstance(body, Ball):
        return Ball((0,) * body.dim, 2 * body.radius, body.closed)
    if isinstance(body, PolytopeH):
        verts = body.vertices
        diffs = [(p[0] - q[0], p[1] - q[1]) for p in verts for q in verts]
        hull = convex_hull_2d(diffs)
        hps = []
        for h in _hull_halfplanes(hull):
            # the face of Delta D with outer normal w is F_w(D) - F_{-w}(D);
            # it is present iff both faces of D meet D
            plus = _face(body, h.a)
            minus = _face(body, tuple(-v for v in h.a))
            present = _face_meets(body, plus) and _face_meets(body, minus)
            hps.append(HalfPlane(h.a, h.b, not present))
        return PolytopeH(tuple(hps))
    raise GeometryError(f"unsupported body {type(body).__name__}")


def _face(poly: PolytopeH, w):
    vals = [w[0] * v[0] + w[1] * v[1] for v in poly.vertices]
    m = max(vals)
    return [v for v, s in zip(poly.vertices, vals) if s == m]


def _face_meets(poly: PolytopeH, face) -> bool:
    if len(face) == 1:
        return poly.contains(face[0])
    a, b = face[0], face[-1]
    mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    return poly.contains(mid) or poly.contains(a) or poly.contains(b)


def lattice_points(body: ConvexBody, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Z^d intersected with the body, as an (n, d) int64 array in lexicographic order."""
    if isinstance(body, AxisBox):
        ranges = body.int_ranges()
        counts = [max(0, b - a + 1) for a, b in ranges]
        total = math.prod(counts)
        if total > budget:
            raise BudgetExceeded(f"{total} lattice points exceed budget {budget}")
        if total == 0:
            return np.zeros((0, body.dim), dtype=np.int64)
        axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in ranges]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return grid.reshape(-1, body.dim)
    lo, hi = body.bbox()
    ranges = [(math.ceil(a), math.floor(b)) for a, b in zip(lo, hi)]
    counts = [max(0, b - a + 1) for a, b in ranges]
    total = math.prod(counts)
    if total > budget:
        raise BudgetExceeded(f"{total} candidate points exceed budget {budget}")
    if total == 0:
        return np.zeros((0, body.dim), dtype=np.int64)
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in ranges]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, body.dim)
    return grid[body.contains_int(grid)]


def interiorize(body: ConvexBody) -> ConvexBody:
    """A body with exactly the same integer points, each of them interior.

    Closed faces carrying lattice points are pushed outward and open faces
    pulled inward by less than the nearest lattice-point slack, so the
    integer point set is unchanged.
    """
    if isinstance(body, AxisBox):
        ranges = body.int_ranges()
        if any(a > b for a, b in ranges):
            raise GeometryError("body contains no integer points")
        half = Fraction(1, 2)
        return AxisBox(tuple(a - half for a, _ in ranges), tuple(b + half for _, b in ranges),
                       (True,) * body.dim, (True,) * body.dim)
    if isinstance(body, Ball):
        if not body.closed:
            return body
        lo, hi = body.bbox()
        grid = _grid(lo, hi, pad=2)
        c = body.center
        q = [sum((int(v) - ci) ** 2 for v, ci in zip(p, c)) for p in grid]
        r2 = body.radius**2
        outside = [v - r2 for v in q if v > r2]
        gap = min(outside) if outside else Fraction(1)
        eta = gap / (4 * body.radius + 4)
        eta = min(eta, Fraction(1, 4))
        return Ball(body.center, body.radius + eta, True)
    if isinstance(body, PolytopeH):
        lo, hi = body.bbox()
        grid = _grid(lo, hi, pad=2)
        inside = [p for p in grid if body.contains(p)]
        hps = []
        for h in body.halfplanes:
            vals = [h.a[0] * p[0] + h.a[1] * p[1] for p in grid]
            if h.strict:
                slack = [h.b - v for v, p in zip(vals, grid) if p in inside]
                eta = min(slack) if slack else Fraction(1)
                hps.append(HalfPlane(h.a, h.b - eta / 2, True))
            else:
                over = [v - h.b for v in vals if v > h.b]
                eta = min(over) if over else Fraction(1)
                hps.append(HalfPlane(h.a, h.b + eta / 2, True))
        return PolytopeH(tuple(hps))
    raise GeometryError(f"unsupported body {type(body).__name__}")


def _grid(lo, hi, pad=1):
    axes = [range(math.floor(a) - pad, math.ceil(b) + pad + 1) for a, b in zip(lo, hi)]
    return [tuple(Fraction(v) for v in p) for p in itertools.product(*axes)]


# ---------------------------------------------------------------- directions and chords

def stereographic_directions(d: int):
    """Deterministic stream of rational unit vectors in R^d with no zero component."""
    if d == 1:
        yield (Fraction(1),)
        return
    fracs = []
    for den in itertools.count(2):
        for num in range(1, den):
            if math.gcd(num, den) == 1:
                fracs.append(Fraction(num, den))
        for v in itertools.product(fracs, repeat=d - 1):
            if max(x.denominator for x in v) != den:
                continue
            n2 = sum(x * x for x in v)
            u = tuple(2 * x / (n2 + 1) for x in v) + ((1 - n2) / (n2 + 1),)
            if all(c != 0 for c in u):
                yield u


def _parallel_to_boundary(body: ConvexBody, u) -> bool:
    if isinstance(body, Ball):
        return False
    if isinstance(body, AxisBox):
        return body.dim >= 2 and any(c == 0 for c in u)
    if isinstance(body, PolytopeH):
        for p, q in body.edges():
            e = (q[0] - p[0], q[1] - p[1])
            if e[0] * u[1] - e[1] * u[0] == 0:
                return True
        return False
    raise GeometryError(f"unsupported body {type(body).__name__}")


def _radial(delta: ConvexBody, u):
    """Largest l with l*u in the closure of the (0-symmetric) difference body."""
    if isinstance(delta, Ball):
        return delta.radius
    if isinstance(delta, AxisBox):
        return min(w / abs(c) for w, c in zip(delta.hi, u) if c != 0)
    if isinstance(delta, PolytopeH):
        vals = []
        for h in delta.halfplanes:
            au = h.a[0] * u[0] + h.a[1] * u[1]
            if au > 0:
                vals.append(h.b / au)
        return min(vals)
    raise GeometryError(f"unsupported body {type(delta).__name__}")


def _is_rational_vec(u) -> bool:
    return all(_kind(c) == "rational" for c in u)


def direction_and_length(body: ConvexBody, u=None):
    """Unit vector u not parallel to any boundary segment, the longest chord
    length lambda parallel to u, and P = lambda * u on the boundary of Delta D.

    Exact rationals when u is rational; floats otherwise.
    """
    if u is None:
        if isinstance(body, Ball):
            u = (Fraction(1),) + (Fraction(0),) * (body.dim - 1)
        else:
            for cand in stereographic_directions(body.dim):
                if not _parallel_to_boundary(body, cand):
                    u = cand
                    break
    if _is_rational_vec(u):
        u = rvec(u)
        if sum(c * c for c in u) != 1:
            raise GeometryError("u must be a unit vector")
        if _parallel_to_boundary(body, u):
            raise GeometryError("direction parallel to boundary segment")
        lam = _radial(difference_body(body), u)
        return u, lam, tuple(lam * c for c in u)
    uf = np.array([float(c) for c in u])
    if abs(np.linalg.norm(uf) - 1) > 1e-12:
        raise GeometryError("u must be a unit vector")
    if isinstance(body, AxisBox) and np.any(np.abs(uf) < 1e-15):
        raise GeometryError("direction parallel to boundary segment")
    if isinstance(body, PolytopeH):
        for p, q in body.edges():
            e = np.array([float(q[0] - p[0]), float(q[1] - p[1])])
            if abs(e[0] * uf[1] - e[1] * uf[0]) < 1e-15 * np.linalg.norm(e):
                raise GeometryError("direction parallel to boundary segment")
    delta = difference_body(body)
    if isinstance(delta, Ball):
        lam = float(delta.radius)
    elif isinstance(delta, AxisBox):
        lam = min(float(w) / abs(c) for w, c in zip(delta.hi, uf) if c != 0)
    else:
        lam = min(float(h.b) / (float(h.a[0]) * uf[0] + float(h.a[1]) * uf[1])
                  for h in delta.halfplanes if float(h.a[0]) * uf[0] + float(h.a[1]) * uf[1] > 0)
    return tuple(uf), lam, tuple(lam * uf)


def orthonormal_completion(u) -> list[tuple]:
    """Orthonormal basis (u, u_2, ..., u_d) via a Householder reflection.

    The reflection maps e_1 to u, so rational u yields a rational basis.
    """
    d = len(u)
    exact = _is_rational_vec(u)
    u = rvec(u) if exact else tuple(float(c) for c in u)
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    e1 = (one,) + (zero,) * (d - 1)
    w = tuple(a - b for a, b in zip(u, e1))
    ww = sum(c * c for c in w)
    cols = []
    for j in range(d):
        ej = tuple(one if i == j else zero for i in range(d))
        if ww == 0:
            cols.append(ej)
            continue
        proj = 2 * w[j] / ww
        cols.append(tuple(ej[i] - proj * w[i] for i in range(d)))
    return cols


def chord_anchor(body: ConvexBody, u, length):
    """A boundary point t' such that t' + length*u is also on the boundary.

    Closed forms for balls (exact square roots) and axis boxes; bisection on
    the chord-length profile for polygons.
    """
    u_exact = _is_rational_vec(u)
    if u_exact:
        u = rvec(u)
    _, lam, _ = direction_and_length(body, u)
    ell = to_rational(length) if _kind(length) == "rational" and u_exact else float(length)
    if ell <= 0 or ell > lam:
        raise GeometryError(f"chord length {float(ell)} outside (0, {float(lam)}]")
    if isinstance(body, Ball):
        w = orthonormal_completion(u)[1] if body.dim > 1 else None
        if isinstance(ell, Fraction):
            h = sqrt_form(body.radius**2 - ell**2 / 4)
            pt = [c - ell / 2 * uc for c, uc in zip(body.center, u)]
            if w is not None:
                pt = [LinearForm.coerce(p) - h * wc for p, wc in zip(pt, w)]
            return tuple(LinearForm.coerce(p) for p in pt)
        h = math.sqrt(max(float(body.radius) ** 2 - ell**2 / 4, 0.0))
        pt = np.array([float(c) for c in body.center]) - ell / 2 * np.array([float(c) for c in u])
        if w is not None:
            pt = pt - h * np.array([float(c) for c in w])
        return tuple(pt)
    if isinstance(body, AxisBox):
        uu = u if u_exact else tuple(float(c) for c in u)
        ratios = [(float(wd) / abs(float(c)), i) for i, (wd, c) in enumerate(zip(body.widths, uu))]
        jstar = min(ratios)[1]
        pt = []
        for i, (a, b, c) in enumerate(zip(body.lo, body.hi, uu)):
            start, sgn = (a, 1) if c > 0 else (b, -1)
            if not u_exact:
                start = float(start)
            if i == jstar:
                pt.append(start)
            else:
                wd = (b - a) if u_exact else float(b - a)
                pt.append(start + sgn * (wd - ell * abs(c)))
        return tuple(pt)
    if isinstance(body, PolytopeH):
        return _polygon_anchor(body, np.array([float(c) for c in u]), float(ell), float(lam))
    raise GeometryError(f"unsupported body {type(body).__name__}")


def _polygon_chord(body: PolytopeH, u, w, h):
    """Entry point and length of the chord {x.w = h} of the closed polygon."""
    base = h * w
    tmin, tmax = -np.inf, np.inf
    for hp in body.halfplanes:
        a = np.array([float(v) for v in hp.a])
        au = a @ u
        rhs = float(hp.b) - a @ base
        if abs(au) < 1e-300:
            if rhs < 0:
                return None, 0.0
            continue
        if au > 0:
            tmax = min(tmax, rhs / au)
        else:
            tmin = max(tmin, rhs / au)
    if tmax < tmin:
        return None, 0.0
    return base + tmin * u, tmax - tmin


def _polygon_anchor(body: PolytopeH, u, ell, lam):
    w = np.array([-u[1], u[0]])
    hs = [float(v[0]) * w[0] + float(v[1]) * w[1] for v in body.vertices]
    hmin, hmax = min(hs), max(hs)
    # locate the offset of the longest chord by golden-section on the concave profile
    a, b = hmin, hmax
    g = (math.sqrt(5) - 1) / 2
    for _ in range(200):
        c, d = b - g * (b - a), a + g * (b - a)
        if _polygon_chord(body, u, w, c)[1] < _polygon_chord(body, u, w, d)[1]:
            a = c
        else:
            b = d
    hstar = (a + b) / 2
    lo, hi = hmin, hstar
    for _ in range(200):
        mid = (lo + hi) / 2
        if _polygon_chord(body, u, w, mid)[1] < ell:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    pt, got = _polygon_chord(body, u, w, hi)
    if pt is None or abs(got - ell) > 1e-12:
        raise GeometryError("chord bisection failed to converge")
    return tuple(pt)
