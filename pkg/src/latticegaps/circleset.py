"""Points m.alpha mod 1 on the circle and their exact gap spectra.

Values are kept as integer coefficient rows over a frame of generators, so
two gaps are equal exactly when their rows agree.  Floating approximations
are used only to sort, and every adjacent pair in the sorted order is
certified to be separated by more than the accumulated rounding error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .reals import (
    CertificationError,
    LinearForm,
    check_independence,
    dense,
    form_from_row,
    frame_of,
    sqrt_form,
)
from . import reals

TWO64 = float(2**64)


# ---------------------------------------------------------------- relations

@dataclass(frozen=True)
class GenericIndependent:
    """1, alpha_1, ..., alpha_d are assumed linearly independent over Q."""

    d: int

    def check(self, alpha: Sequence[LinearForm]) -> None:
        alpha = [LinearForm.coerce(a) for a in alpha]
        if len(alpha) != self.d:
            raise ValueError("alpha has the wrong dimension")
        frame = frame_of(alpha)
        if _rank([a.coeffs(frame)[1:] for a in alpha]) < self.d:
            raise ValueError("alpha satisfies a rational relation over its generators")
        rel = check_independence(frame)
        if rel is not None:
            raise ValueError(f"generators satisfy a small integer relation {rel}")


@dataclass(frozen=True)
class RationalBeta:
    """alpha_i = (B_i / Q) * beta + s_i with Q s_i integral and gcd(B) = 1,
    so that Q alpha_i - B_i beta is an integer."""

    Q: int
    B: tuple[int, ...]
    s: tuple[Fraction, ...]
    beta: LinearForm = field(default_factory=lambda: sqrt_form(2))

    def __post_init__(self):
        object.__setattr__(self, "B", tuple(int(b) for b in self.B))
        object.__setattr__(self, "s", tuple(Fraction(v) for v in self.s))
        object.__setattr__(self, "beta", LinearForm.coerce(self.beta))
        if self.Q < 1:
            raise ValueError("Q must be positive")
        if len(self.B) != len(self.s):
            raise ValueError("B and s must have the same length")
        if any((self.Q * v).denominator != 1 for v in self.s):
            raise ValueError("Q * s_i must be integers")
        if math.gcd(*self.B) != 1:
            raise ValueError("gcd(B) must be 1 after normalization")
        if self.beta.is_rational:
            raise ValueError("beta must be irrational")

    @property
    def d(self) -> int:
        return len(self.B)

    @property
    def r(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(b, self.Q) for b in self.B)

    @classmethod
    def from_affine(cls, r: Sequence, s: Sequence, beta) -> "RationalBeta":
        """Normalize alpha = r*beta + s into the smallest Q and coprime B.

        beta is rescaled by the rational gcd of Q*r, so the returned
        relation may carry a different (proportional) beta.
        """
        r = [Fraction(v) for v in r]
        s = [Fraction(v) for v in s]
        if all(v == 0 for v in r):
            raise ValueError("at least one r_i must be non-zero")
        Q = 1
        for v in s:
            Q = Q * v.denominator // math.gcd(Q, v.denominator)
        qr = [Q * v for v in r]
        num = math.gcd(*(v.numerator for v in qr))
        den = 1
        for v in qr:
            den = den * v.denominator // math.gcd(den, v.denominator)
        c = Fraction(num, den)
        B = tuple(int(v / c) for v in qr)
        return cls(Q, B, tuple(s), LinearForm.coerce(beta) * c)

    def alpha(self) -> tuple[LinearForm, ...]:
        return tuple(self.beta * Fraction(b, self.Q) + v for b, v in zip(self.B, self.s))

    def canonical(self, value: LinearForm) -> tuple[Fraction, Fraction]:
        """The unique pair (a, b) with value = a*beta + b."""
        gens = self.beta.generators
        g = gens[0]
        a = value.coefficient(g) / self.beta.coefficient(g)
        rest = value - self.beta * a
        return a, rest.to_fraction()

    def check(self, alpha: Sequence[LinearForm]) -> None:
        if tuple(LinearForm.coerce(a) for a in alpha) != self.alpha():
            raise ValueError("alpha does not satisfy the declared relation")


RelationSpec = GenericIndependent | RationalBeta


def _rank(rows) -> int:
    m = [list(map(Fraction, r)) for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


# ---------------------------------------------------------------- report

@dataclass
class GapReport:
    """Sorted points of a finite subset of R/Z and the gaps after each point.

    Row ``i`` of ``point_rows`` / ``gap_rows`` is an integer vector ``c``
    meaning ``(c[0] + sum c[j] * frame[j-1]) / den``.
    """

    frame: tuple
    den: int
    point_rows: np.ndarray
    gap_rows: np.ndarray
    gap_approx: np.ndarray
    ms: np.ndarray | None = None

    @property
    def n_points(self) -> int:
        return len(self.point_rows)

    def _codes(self):
        if not hasattr(self, "_cache"):
            uniq, inv, counts = _unique_rows(self.gap_rows)
            self._cache = (uniq, inv, counts)
        return self._cache

    @property
    def count(self) -> int:
        return len(self._codes()[0])

    @property
    def points(self) -> list[LinearForm]:
        return [form_from_row(self.frame, r, self.den) for r in self.point_rows]

    @property
    def gaps(self) -> list[LinearForm]:
        return [form_from_row(self.frame, r, self.den) for r in self.gap_rows]

    @property
    def distinct_gaps(self) -> list[tuple[LinearForm, int]]:
        uniq, inv, counts = self._codes()
        approx = np.zeros(len(uniq))
        approx[inv] = self.gap_approx
        order = np.argsort(approx, kind="stable")
        return [(form_from_row(self.frame, uniq[i], self.den), int(counts[i])) for i in order]

    @property
    def max_gap(self) -> float:
        return float(self.gap_approx.max())

    @property
    def min_gap(self) -> float:
        return float(self.gap_approx.min())

    def gap_sum(self) -> LinearForm:
        total = np.asarray(self.gap_rows, dtype=object).sum(axis=0)
        return form_from_row(self.frame, total, self.den)

    def gap_after(self, m) -> LinearForm:
        if self.ms is None:
            raise ValueError("report was built without integer labels")
        hit = np.nonzero(np.all(self.ms == np.asarray(m), axis=1))[0]
        if len(hit) == 0:
            raise KeyError(f"{tuple(m)} is not a labelled point")
        return form_from_row(self.frame, self.gap_rows[hit[0]], self.den)

    def to_json(self) -> dict:
        out = []
        for g, mult in self.distinct_gaps:
            out.append({"coeffs": g.to_json(), "numeric": float(g), "mult": mult})
        return {"count": self.count, "gaps": out}


def _unique_rows(rows: np.ndarray):
    rows = np.asarray(rows)
    if rows.dtype != object and len(rows):
        lo = rows.min(axis=0)
        span = rows.max(axis=0) - lo + 1
        if math.prod(int(v) for v in span) < 2**62:
            strides = np.cumprod(np.concatenate(([1], span[:-1]))).astype(np.int64)
            codes = ((rows - lo) * strides).sum(axis=1)
            _, first, inv, counts = np.unique(codes, return_index=True, return_inverse=True, return_counts=True)
            return rows[first], inv, counts
    if len(rows) == 0:
        return rows, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    keyed = {}
    inv = np.empty(len(rows), dtype=np.int64)
    for i, r in enumerate(rows):
        inv[i] = keyed.setdefault(tuple(int(v) for v in r), len(keyed))
    uniq = np.array(list(keyed), dtype=object)
    counts = np.bincount(inv, minlength=len(keyed))
    return uniq, inv, counts


# ---------------------------------------------------------------- core

def _frame_values(frame) -> np.ndarray:
    return np.array([1.0] + [float(g) for g in frame])


def _reduced_rows(X, L, floors):
    P = np.array(X, dtype=object if X.dtype == object else np.int64, copy=True)
    P[:, 0] = P[:, 0] - floors * L
    return P


def _finish(frame, L, X, v, p, ms):
    """Given sorted exact rows X with certified cyclic order (approx v at p bits)."""
    n = len(X)
    gv = _frame_values(frame)
    if n == 1:
        gap_rows = np.zeros_like(X)
        gap_rows[0, 0] = L
        gap_approx = np.array([1.0])
    else:
        nxt = np.roll(np.arange(n), -1)
        dX = X[nxt] - X
        if p == 64:
            gap_u = v[nxt] - v
            gap_approx = gap_u.astype(np.float64) / TWO64
        else:
            mod = 1 << p
            gap_approx = np.array([float(((a - b) % mod)) / float(mod) for a, b in zip(v[nxt], v)])
        val = (dX.astype(np.float64) @ gv) / L
        nint = np.rint(val - gap_approx).astype(np.int64)
        if np.any(np.abs(val - gap_approx - nint) > 1e-6):
            raise CertificationError("inconsistent integer part while forming gaps")
        gap_rows = dX.copy()
        gap_rows[:, 0] = gap_rows[:, 0] - nint * L
    if p == 64:
        frac_approx = v.astype(np.float64) / TWO64
    else:
        frac_approx = np.array([float(a) / float(1 << p) for a in v])
    val = (X.astype(np.float64) @ gv) / L
    floors = np.rint(val - frac_approx).astype(np.int64)
    points = _reduced_rows(X, L, floors)
    # points whose approximation sits across 0 from the true value can be
    # off by one turn; they can only be at the two ends of the sorted list
    shift = 0
    for _ in range(n):
        last = (n - 1 - shift) % n
        if form_from_row(frame, points[last], L).sign() >= 0 and \
                (form_from_row(frame, points[last], L) - 1).sign() >= 0:
            points[last, 0] -= L
            shift += 1
        else:
            break
    for _ in range(n):
        first = (-shift) % n
        if form_from_row(frame, points[first], L).sign() < 0:
            points[first, 0] += L
            shift -= 1
        else:
            break
    if shift:
        points = np.roll(points, shift, axis=0)
        gap_rows = np.roll(gap_rows, shift, axis=0)
        gap_approx = np.roll(gap_approx, shift)
        if ms is not None:
            ms = np.roll(ms, shift, axis=0)
    return GapReport(frame, L, points, gap_rows, gap_approx, ms)


def _approx_bits(alpha_rows, frame, L, p):
    """Fixed-point p-bit approximations of the values, with error bound in units."""
    gvals = [1 << (p + 8)] + [g.approx(p + 8) for g in frame]
    out = []
    for row in alpha_rows:
        s = sum(int(c) * a for c, a in zip(row, gvals))
        out.append((s // L) >> 8)
    return out


def _spectrum_bigint(frame, L, X, p):
    """Sort exact rows X (values X.(1,g)/L mod 1) at p bits with Python integers."""
    mod = 1 << p
    Xo = np.asarray(X, dtype=object)
    v = np.array([a % mod for a in _approx_bits(Xo, frame, L, p)], dtype=object)
    # each frame approximation is off by at most 3 units at p + 8 bits
    err = np.array([(3 * sum(abs(int(c)) for c in row[1:]) + L) // (L * 256) + 2 for row in Xo], dtype=object)
    order = sorted(range(len(v)), key=lambda i: v[i])
    return order, v, err


def _certify_and_merge(order, v, err, keyfun, mod):
    """Drop exact duplicates inside unresolved clusters; return kept order or None."""
    n = len(order)
    if n <= 1:
        return list(order)
    keep = []
    i = 0
    vs = [int(v[j]) for j in order]
    es = [int(err[j]) for j in order]
    ok = [((vs[(k + 1) % n] - vs[k]) % mod) > es[k] + es[(k + 1) % n] for k in range(n)]
    if all(ok):
        return list(order)
    if not any(ok):
        keys = {keyfun(j) for j in order}
        return [order[0]] if len(keys) == 1 else None
    start = ok.index(True) + 1
    k = 0
    while k < n:
        idx = (start + k) % n
        cluster = [order[idx]]
        while not ok[(start + k) % n]:
            k += 1
            cluster.append(order[(start + k) % n])
        if len({keyfun(j) for j in cluster}) != 1:
            return None
        keep.append(cluster[0])
        k += 1
    # restore ascending order of approximations
    keep.sort(key=lambda j: int(v[j]))
    return keep


def _exact_key(X, L, j):
    row = X[j]
    return (int(row[0]) % L,) + tuple(int(c) for c in row[1:])


def spectrum_from_rows(frame, L, X, ms=None) -> GapReport:
    """Gap spectrum of the values X.(1, frame)/L mod 1 (set semantics)."""
    X = np.asarray(X)
    if len(X) == 0:
        raise ValueError("empty point set")
    p = reals.DEFAULT_BITS
    while p <= reals.MAX_BITS:
        order, v, err = _spectrum_bigint(frame, L, X, p)
        kept = _certify_and_merge(order, v, err, lambda j: _exact_key(X, L, j), 1 << p)
        if kept is not None:
            idx = np.array(kept, dtype=np.int64)
            return _finish(frame, L, X[idx], v[idx], p, None if ms is None else ms[idx])
        p *= 2
    raise CertificationError("could not certify the cyclic order of the points")


def spectrum(alpha: Sequence, pts: np.ndarray, rel=None) -> GapReport:
    """Exact gap spectrum of {m . alpha mod 1 : m in pts}.

    A vectorised 64-bit fixed-point pass is tried first; pairs it cannot
    separate are either exact duplicates (merged) or trigger a multiprecision
    retry.
    """
    alpha = [LinearForm.coerce(a) for a in alpha]
    if rel is not None:
        rel.check(alpha)
    pts = np.asarray(pts, dtype=np.int64)
    if pts.ndim != 2 or pts.shape[1] != len(alpha):
        raise ValueError("points must be an (n, d) integer array matching alpha")
    if len(pts) == 0:
        raise ValueError("empty point set")
    frame, K, L = dense(alpha)
    Kn = np.array(K, dtype=object)
    kmax = max(abs(int(c)) for c in Kn.flat) if Kn.size else 0
    mmax = int(np.abs(pts).max())
    big = kmax * mmax * pts.shape[1] >= 2**62
    X = (pts.astype(object) @ Kn) if big else pts @ Kn.astype(np.int64)
    if big:
        return spectrum_from_rows(frame, L, X, pts)
    # frac(alpha_i) to 64 bits, error at most 1 unit
    a = np.array([_frac64(x) for x in alpha], dtype=np.uint64)
    mu = pts.view(np.uint64)
    v = (mu * a).sum(axis=1, dtype=np.uint64)
    err = (2 * np.abs(pts).sum(axis=1) + 2).astype(np.uint64)
    order = np.argsort(v, kind="stable")
    vs = v[order]
    es = err[order]
    n = len(vs)
    if n > 1:
        nxt = np.roll(np.arange(n), -1)
        gaps = vs[nxt] - vs
        ok = gaps > es + es[nxt]
        if not ok.all():
            key = lambda j: _exact_key(X, L, j)
            kept = _certify_and_merge(list(order), v, err, key, 1 << 64)
            if kept is None:
                return spectrum_from_rows(frame, L, X, pts)
            order = np.array(kept, dtype=np.int64)
    return _finish(frame, L, X[order], v[order], 64, pts[order])


def _frac64(x: LinearForm) -> int:
    a, _ = x.approx(72)
    return (a >> 8) % (1 << 64)


# ---------------------------------------------------------------- public helpers

def frac_points(alpha: Sequence, pts, rel=None) -> list[LinearForm]:
    """The set {m . alpha mod 1}, sorted increasingly, as exact forms."""
    pts = np.asarray(pts, dtype=np.int64).reshape(-1, len(alpha))
    return spectrum(alpha, pts, rel).points


def gap_spectrum(points: Sequence, rel=None) -> GapReport:
    """Gap report of explicit distinct points of [0, 1)."""
    forms = [LinearForm.coerce(x) for x in points]
    if not forms:
        raise ValueError("points must be non-empty")
    for x in forms:
        if x.sign() < 0 or (x - 1).sign() >= 0:
            raise ValueError(f"point {x!r} is not in [0, 1)")
    if len(set(forms)) != len(forms):
        raise ValueError("points must be pairwise distinct")
    frame, rows, L = dense(forms)
    return spectrum_from_rows(frame, L, np.array(rows, dtype=object))


def distinct_count_numeric(values: Sequence[float], rel_tol: float = 1e-9, abs_tol: float = 1e-12) -> int:
    """Single-linkage cluster count with threshold rel_tol * max|v| + abs_tol.

    A heuristic: chains of close values collapse into one cluster, so the
    result can undercount.
    """
    if rel_tol <= 0 and abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    vals = np.sort(np.asarray(values, dtype=np.float64))
    if len(vals) == 0:
        return 0
    thr = rel_tol * float(np.abs(vals).max()) + abs_tol
    return int(1 + np.count_nonzero(np.diff(vals) > thr))
