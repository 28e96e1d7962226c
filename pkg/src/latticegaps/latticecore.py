"""Unimodular lattices Z^{d+1} M, the gap function F(M, t) and its candidate set.

Bases keep an exact copy of their entries (rationals or linear forms over
irrational generators) next to a float copy.  Enumeration reduces the basis
with LLL, walks the integer box covering the preimage of the region, filters
in floating point with a safety margin, and settles every undecided point
exactly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import geometry as geo
from .geometry import BudgetExceeded, ConvexBody
from .reals import LinearForm, as_exact, dense, form_from_row, sqrt_form

DEFAULT_BUDGET = 2 * 10**6
Y_CAP = 2.0**40


# ---------------------------------------------------------------- values

def _is_exact(v) -> bool:
    return as_exact(v) is not None


def _simplify(v):
    """Fractions for rational forms, forms otherwise."""
    if isinstance(v, LinearForm) and v.is_rational:
        return v.to_fraction()
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    return v


def _mul(a, b):
    if isinstance(a, LinearForm) or isinstance(b, LinearForm):
        return _simplify(LinearForm.coerce(a) * LinearForm.coerce(b))
    return a * b


def _det_exact(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    # expand along the row or column with most zeros
    best, best_zeros, by_row = 0, -1, True
    for i in range(n):
        z = sum(1 for v in rows[i] if v == 0)
        if z > best_zeros:
            best, best_zeros, by_row = i, z, True
        z = sum(1 for r in rows if r[i] == 0)
        if z > best_zeros:
            best, best_zeros, by_row = i, z, False
    total = Fraction(0)
    for j in range(n):
        entry = rows[best][j] if by_row else rows[j][best]
        if entry == 0:
            continue
        r, c = (best, j) if by_row else (j, best)
        minor = [row[:c] + row[c + 1:] for k, row in enumerate(rows) if k != r]
        term = _mul(entry, _det_exact(minor))
        total = _sum_exact([total, term if (r + c) % 2 == 0 else _neg(term)])
    return total


def _neg(v):
    return _simplify(-v)


@dataclass(frozen=True)
class DetCertificate:
    value: object
    exact: bool
    error: float

    @property
    def ok(self) -> bool:
        if self.exact:
            return self.value == 1
        return abs(float(self.value) - 1.0) <= max(self.error, 1e-12)


# ---------------------------------------------------------------- bases

class LatticeBasis:
    """Rows generating the lattice Z^{d+1} M."""

    def __init__(self, rows: Sequence[Sequence], name: str = ""):
        rows = [list(r) for r in rows]
        n = len(rows)
        if n < 2 or any(len(r) != n for r in rows):
            raise ValueError("basis must be a square matrix of size >= 2")
        self.name = name
        self.n = n
        if all(_is_exact(v) for r in rows for v in r):
            self.exact = [[_simplify(as_exact(v)) for v in r] for r in rows]
            forms = [LinearForm.coerce(v) for r in self.exact for v in r]
            self.frame, num, self.den = dense(forms)
            self.num = np.array(num, dtype=object).reshape(n, n, -1)
            self.mode = "rational" if not self.frame else "algebraic"
            self.float = self._exact_float(self.num)
        else:
            self.exact = None
            self.frame, self.num, self.den = (), None, 1
            self.mode = "float64"
            self.float = np.array([[float(v) for v in r] for r in rows], dtype=np.float64)
        if abs(np.linalg.det(self.float)) < 1e-300:
            raise ValueError("singular basis")
        self._reduced = {}
        self._det = None

    @property
    def dim(self) -> int:
        return self.n - 1

    # exact helpers ----------------------------------------------------
    def _exact_float(self, num: np.ndarray) -> np.ndarray:
        """Correctly rounded floats of exact rows given as integer coefficient arrays."""
        p = 160
        approx = np.array([1 << p] + [g.approx(p) for g in self.frame], dtype=object)
        vals = (num * approx).sum(axis=-1)
        scale = self.den << p
        out = np.empty(vals.shape, dtype=np.float64)
        for idx in np.ndindex(vals.shape):
            out[idx] = float(Fraction(int(vals[idx]), scale))
        return out

    def exact_point(self, coords) -> tuple:
        """The lattice vector coords . M with exact entries (floats in float mode)."""
        c = np.asarray(coords, dtype=object)
        if self.exact is None:
            return tuple(np.asarray(coords, dtype=np.float64) @ self.float)
        rows = np.tensordot(c, self.num, axes=(0, 0))
        return tuple(_simplify(form_from_row(self.frame, r, self.den)) for r in rows)

    def det_certificate(self) -> DetCertificate:
        if self._det is None:
            if self.exact is not None:
                try:
                    self._det = DetCertificate(_det_exact(self.exact), True, 0.0)
                except TypeError:
                    self._det = None
            if self._det is None:
                import mpmath

                with mpmath.workdps(60):
                    m = mpmath.matrix([[mpmath.mpf(float(v)) if self.exact is None else
                                        mpmath.mpf(LinearForm.coerce(v).approx(190)[0]) / mpmath.mpf(2) ** 190
                                        for v in r] for r in (self.exact or self.float.tolist())])
                    val = mpmath.det(m)
                err = 1e-40 if self.exact is not None else self.n * 4e-16 * float(np.abs(self.float).max()) ** self.n
                self._det = DetCertificate(float(val), False, err)
        return self._det

    def negate_row(self, i: int) -> "LatticeBasis":
        src = self.exact if self.exact is not None else self.float.tolist()
        rows = [list(r) for r in src]
        rows[i] = [_simplify(-LinearForm.coerce(v)) if self.exact is not None else -v for v in rows[i]]
        return LatticeBasis(rows, self.name)

    def left_multiply(self, U) -> "LatticeBasis":
        """The basis U M for an integer matrix U."""
        U = np.asarray(U, dtype=object)
        if self.exact is None:
            return LatticeBasis((U.astype(np.float64) @ self.float).tolist(), self.name)
        num = np.tensordot(U, self.num, axes=(1, 0))
        rows = [[_simplify(form_from_row(self.frame, num[i, j], self.den)) for j in range(self.n)]
                for i in range(self.n)]
        return LatticeBasis(rows, self.name)

    def multiply(self, other: "LatticeBasis") -> "LatticeBasis":
        """Matrix product self @ other (exact when one factor is rational)."""
        a = self.exact if self.exact is not None else self.float.tolist()
        b = other.exact if other.exact is not None else other.float.tolist()
        if self.exact is not None and other.exact is not None:
            try:
                rows = [[_sum_exact(_mul(a[i][k], b[k][j]) for k in range(self.n)) for j in range(self.n)]
                        for i in range(self.n)]
                return LatticeBasis(rows)
            except TypeError:
                pass
        return LatticeBasis((self.float @ other.float).tolist())

    def transpose_inverse(self) -> "LatticeBasis":
        if self.mode == "rational":
            inv = _inverse_fraction(self.exact)
            return LatticeBasis([[inv[j][i] for j in range(self.n)] for i in range(self.n)])
        return LatticeBasis(np.linalg.inv(self.float).T.tolist())

    # reduction --------------------------------------------------------
    def reduced(self, shape: tuple | None = None):
        """(U, rows) with U integer unimodular and rows = U M (floats), LLL-reduced
        after the coordinates are divided by 2**shape."""
        key = None if shape is None or not any(shape) else tuple(shape)
        if key not in self._reduced:
            self._reduced[key] = self._lll(scale=None if key is None else 2.0 ** np.array(key))
        return self._reduced[key]

    def _rows_for(self, U: np.ndarray) -> np.ndarray:
        if self.exact is None:
            return U.astype(np.float64) @ self.float
        num = np.tensordot(U.astype(object), self.num, axes=(1, 0))
        return self._exact_float(num)

    def _lll(self, delta: float = 0.99, scale: np.ndarray | None = None):
        n = self.n
        U = np.eye(n, dtype=np.int64)
        scale = np.ones(n) if scale is None else scale

        def rows(U):
            return self._rows_for(U) / scale

        B = rows(U)
        k = 1
        for _ in range(10000):
            if k >= n:
                break
            Bs, mu = _gram_schmidt(B)
            changed = False
            for j in range(k - 1, -1, -1):
                q = int(round(mu[k, j]))
                if q:
                    U[k] -= q * U[j]
                    changed = True
                    mu[k, : j + 1] -= q * mu[j, : j + 1]
            if changed:
                B = rows(U)
                Bs, mu = _gram_schmidt(B)
            if Bs[k] @ Bs[k] >= (delta - mu[k, k - 1] ** 2) * (Bs[k - 1] @ Bs[k - 1]):
                k += 1
            else:
                U[[k - 1, k]] = U[[k, k - 1]]
                B = rows(U)
                k = max(k - 1, 1)
        return U, self._rows_for(U)

    def to_json(self) -> dict:
        if self.exact is None:
            return {"mode": "float64", "rows": self.float.tolist()}
        def enc(v):
            return str(v) if isinstance(v, Fraction) else v.to_json()
        return {"mode": self.mode, "rows": [[enc(v) for v in r] for r in self.exact]}

    def __repr__(self):
        return f"LatticeBasis({self.name or self.mode}, {self.float.tolist()})"


def _sum_exact(values):
    total = Fraction(0)
    for v in values:
        total = _simplify(v + total) if isinstance(v, LinearForm) else _simplify(total + v)
    return total


def _gram_schmidt(B):
    n = len(B)
    Bs = np.zeros_like(B)
    mu = np.zeros((n, n))
    for i in range(n):
        v = B[i].copy()
        for j in range(i):
            mu[i, j] = (B[i] @ Bs[j]) / (Bs[j] @ Bs[j])
            v -= mu[i, j] * Bs[j]
        Bs[i] = v
    return Bs, mu


def _inverse_fraction(rows):
    n = len(rows)
    a = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        p = next(i for i in range(c, n) if a[i][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [v / piv for v in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [r[n:] for r in a]


def _as_matrix(B, d):
    """A scalar, diagonal factors or a full matrix, as rational rows."""
    if not isinstance(B, (list, tuple, np.ndarray)):
        B = [B] * d
    B = list(B)
    if all(not isinstance(v, (list, tuple)) for v in B):
        if len(B) != d:
            raise ValueError("B has the wrong dimension")
        return [[geo.to_rational(B[i]) if i == j else Fraction(0) for j in range(d)] for i in range(d)]
    rows = [[geo.to_rational(v) for v in r] for r in B]
    if len(rows) != d or any(len(r) != d for r in rows):
        raise ValueError("B has the wrong dimension")
    return rows


def _det_fraction(rows):
    return _det_exact([[Fraction(v) for v in r] for r in rows])


# ---------------------------------------------------------------- builders

def steinhaus_basis(alpha: Sequence, B) -> LatticeBasis:
    """A_B = [[1, alpha^t], [0, 1]] . diag(B^{-1}, det B)."""
    d = len(alpha)
    Bm = _as_matrix(B, d)
    det = _det_fraction(Bm)
    if det <= 0:
        raise ValueError("B must have positive determinant")
    inv = _inverse_fraction(Bm)
    exact = all(_is_exact(a) for a in alpha)
    rows = []
    for i in range(d):
        y = _mul(as_exact(alpha[i]), det) if exact else float(alpha[i]) * float(det)
        rows.append(list(inv[i]) + [y])
    rows.append([Fraction(0)] * d + [det])
    return LatticeBasis(rows, "A_B")


def slater_basis(alpha: Sequence, B) -> LatticeBasis:
    """[[1, 0], [alpha, 1]] . diag(B^{-1}, det B)."""
    d = len(alpha)
    Bm = _as_matrix(B, d)
    det = _det_fraction(Bm)
    if det <= 0:
        raise ValueError("B must have positive determinant")
    inv = _inverse_fraction(Bm)
    rows = [list(inv[i]) + [Fraction(0)] for i in range(d)]
    last = []
    for j in range(d):
        acc = _sum_exact(_mul(as_exact(alpha[i]), inv[i][j]) for i in range(d)) \
            if all(_is_exact(a) for a in alpha) else sum(float(alpha[i]) * float(inv[i][j]) for i in range(d))
        last.append(acc)
    rows.append(last + [det])
    return LatticeBasis(rows, "A~_B")


def diag_flow(s, d: int) -> LatticeBasis:
    """Phi^s = diag(e^{-s}, ..., e^{-s}, e^{ds})."""
    if s == 0:
        return LatticeBasis([[Fraction(int(i == j)) for j in range(d + 1)] for i in range(d + 1)], "Phi^0")
    s = float(s)
    diag = [math.exp(-s)] * d + [math.exp(d * s)]
    return LatticeBasis([[diag[i] if i == j else 0.0 for j in range(d + 1)] for i in range(d + 1)], f"Phi^{s}")


def dtheta(theta, d: int) -> LatticeBasis:
    """D(theta) = diag(theta, ..., theta, theta^{-d})."""
    if _is_exact(theta) and as_exact(theta).is_rational:
        t = as_exact(theta).to_fraction()
        if t <= 0:
            raise ValueError("theta must be positive")
        diag = [t] * d + [t ** (-d)]
    else:
        t = float(theta)
        if t <= 0:
            raise ValueError("theta must be positive")
        diag = [t] * d + [t ** (-d)]
    zero = Fraction(0) if isinstance(diag[0], Fraction) else 0.0
    return LatticeBasis([[diag[i] if i == j else zero for j in range(d + 1)] for i in range(d + 1)], "D(theta)")


@dataclass(frozen=True)
class PropositionContext:
    body: ConvexBody
    eps: Fraction
    u: tuple
    lam: object
    ortho: tuple
    scale: object
    flipped: bool

    @property
    def m_max(self) -> int:
        return math.floor(float(self.lam) / float(self.eps) + 1e-12) if not _is_exact(self.lam) else \
            math.floor(Fraction(self.lam) / self.eps)

    def t_m(self, m: int) -> tuple:
        """t_m = t'_m + (eps/4) u with t'_m the anchor of the chord of length lam - eps m + eps/2."""
        if not 1 <= m <= self.m_max:
            raise ValueError(f"m must be in 1..{self.m_max}")
        ell = self.lam - self.eps * m + self.eps / 2
        tp = geo.chord_anchor(self.body, self.u, ell)
        return tuple(_simplify(a + self.eps / 4 * c) if _is_exact(a) else float(a) + float(self.eps) / 4 * float(c)
                     for a, c in zip(tp, self.u))


def proposition_basis(body: ConvexBody, eps, u=None) -> tuple[LatticeBasis, PropositionContext]:
    """The basis M_eps with rows (eps u, -eps), (lam u, 0), (eps lam)^{-1/(d-1)} (u_i, 0)."""
    d = body.dim
    if d < 2:
        raise ValueError("the construction needs d >= 2")
    eps = geo.to_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    u, lam, _ = geo.direction_and_length(body, u)
    ortho = geo.orthonormal_completion(u)
    exact = all(_is_exact(c) for c in u) and _is_exact(lam)
    if exact:
        el = eps * lam
        if d == 2:
            scale = 1 / el
        elif d == 3:
            scale = _simplify(sqrt_form(1 / el))
        else:
            scale = float(el) ** (-1.0 / (d - 1))
            exact = False
    else:
        scale = (float(eps) * float(lam)) ** (-1.0 / (d - 1))
    if not exact:
        u = tuple(float(c) for c in u)
        ortho = [tuple(float(c) for c in v) for v in ortho]
        lam_f, eps_f = float(lam), float(eps)
        rows = [[eps_f * c for c in u] + [-eps_f], [lam_f * c for c in u] + [0.0]]
        rows += [[float(scale) * c for c in v] + [0.0] for v in ortho[1:]]
    else:
        rows = [[eps * c for c in u] + [-eps], [lam * c for c in u] + [Fraction(0)]]
        rows += [[_mul(scale, c) for c in v] + [Fraction(0)] for v in ortho[1:]]
    M = LatticeBasis(rows, "M_eps")
    det = M.det_certificate()
    flipped = float(det.value) < 0
    if flipped:
        M = M.negate_row(M.n - 1)
    M.name = "M_eps"
    radius = geo.difference_body(body).bounding_radius()
    if float(scale) <= radius:
        raise ValueError(f"eps too large: (eps*lam)^(-1/(d-1)) = {float(scale):.6g} "
                         f"does not exceed the difference-body radius {radius:.6g}")
    ctx = PropositionContext(body, eps, tuple(u), lam, tuple(ortho), scale, flipped)
    return M, ctx


# ---------------------------------------------------------------- enumeration

@dataclass(frozen=True)
class Region:
    """{(x, y) : x + shift in body, y in the interval (ylo, yhi]} (flags adjustable)."""

    body: ConvexBody
    ylo: object
    yhi: object
    ylo_closed: bool = False
    yhi_closed: bool = True
    shift: tuple | None = None


@dataclass(frozen=True)
class LatticePoint:
    coords: tuple[int, ...]
    x: tuple
    y: object

    @property
    def vector(self) -> tuple:
        return self.x + (self.y,)


def _enumerate_box(M: LatticeBasis, lo: np.ndarray, hi: np.ndarray, budget: int):
    """Yield chunks (n', P, U, R) of reduced coordinates and float points covering the box.

    The basis is reduced for the box's aspect ratio (rounded to powers of
    two), so the bounding parallelepiped stays close to the box.
    """
    half = np.maximum((hi - lo) / 2, 1e-300)
    exps = np.rint(np.log2(half)).astype(np.int64)
    U, R = M.reduced(tuple(int(e) for e in exps - exps.max()))
    W = np.linalg.inv(R)
    # n' = p W ; range of each coordinate over the box
    a = lo[:, None] * W
    b = hi[:, None] * W
    nlo = np.minimum(a, b).sum(axis=0)
    nhi = np.maximum(a, b).sum(axis=0)
    pad = 1e-9 * (1 + np.abs(nlo) + np.abs(nhi))
    first = np.floor(nlo - pad).astype(np.int64)
    last = np.ceil(nhi + pad).astype(np.int64)
    counts = last - first + 1
    total = int(np.prod(counts.astype(object)))
    if total > budget:
        raise BudgetExceeded(f"{total} candidate lattice coordinates exceed budget {budget}")
    if total == 0:
        return
    inner = [np.arange(f, l + 1, dtype=np.int64) for f, l in zip(first[1:], last[1:])]
    grid = np.stack(np.meshgrid(*inner, indexing="ij"), axis=-1).reshape(-1, len(first) - 1)
    for c0 in range(first[0], last[0] + 1):
        npr = np.concatenate([np.full((len(grid), 1), c0, dtype=np.int64), grid], axis=1)
        yield npr, npr.astype(np.float64) @ R, U, R


def _margin(npr: np.ndarray, R: np.ndarray) -> np.ndarray:
    scale = np.abs(npr).astype(np.float64) @ np.abs(R).max(axis=1)
    return 1e-11 * (1.0 + scale)


def _y_ok(y, region: Region) -> bool:
    lo_ok = y > region.ylo or (region.ylo_closed and y == region.ylo)
    hi_ok = y < region.yhi or (region.yhi_closed and y == region.yhi)
    return bool(lo_ok and hi_ok)


def _shifted(x, shift):
    if shift is None:
        return x
    out = []
    for a, b in zip(x, shift):
        if _is_exact(a) and _is_exact(b):
            out.append(_simplify(LinearForm.coerce(as_exact(a)) + as_exact(b)))
        else:
            out.append(float(a) + float(b))
    return tuple(out)


def points_in_region(M: LatticeBasis, region: Region, budget: int = DEFAULT_BUDGET) -> list[LatticePoint]:
    """All points of Z^{d+1} M in the region, sorted by (y, coordinates)."""
    d = M.dim
    body = region.body
    if body.dim != d:
        raise ValueError("region body has the wrong dimension")
    shift_f = np.zeros(d) if region.shift is None else np.array([float(v) for v in region.shift])
    blo, bhi = body.bbox()
    lo = np.array([float(v) for v in blo] + [float(region.ylo)]) - np.append(shift_f, 0.0)
    hi = np.array([float(v) for v in bhi] + [float(region.yhi)]) - np.append(shift_f, 0.0)
    if np.any(hi < lo):
        return []
    slack = 1e-9 * (1 + np.abs(lo) + np.abs(hi))
    lo, hi = lo - slack, hi + slack
    ylo_f, yhi_f = float(region.ylo), float(region.yhi)
    out = []
    for npr, P, U, R in _enumerate_box(M, lo, hi, budget):
        marg = _margin(npr, R)
        X = P[:, :d] + shift_f
        Y = P[:, d]
        maybe = body.contains_float(X, 0.0) | body.contains_float(X, 1e-7)
        maybe &= (Y >= ylo_f - 1e-7 - marg) & (Y <= yhi_f + 1e-7 + marg)
        if not maybe.any():
            continue
        idx = np.nonzero(maybe)[0]
        for i in idx:
            coords = tuple(int(v) for v in npr[i] @ U)
            if M.exact is None:
                p = P[i]
                xv, yv = tuple(p[:d]), float(p[d])
                if not (body.contains(tuple(float(v) for v in _shifted(xv, region.shift))) and
                        _y_ok(yv, region)):
                    continue
            else:
                m = marg[i]
                inside = body.contains_float(X[i:i + 1], -m)[0] and ylo_f + m < Y[i] < yhi_f - m
                outside = (not body.contains_float(X[i:i + 1], m)[0]) or Y[i] < ylo_f - m or Y[i] > yhi_f + m
                if outside:
                    continue
                vec = M.exact_point(coords)
                xv, yv = vec[:d], vec[d]
                if not inside:
                    if not _y_ok(yv, region):
                        continue
                    if not body.contains(_shifted(xv, region.shift)):
                        continue
            out.append(LatticePoint(coords, tuple(xv), yv))
    out.sort(key=lambda p: (float(p.y), p.coords))
    return out


# ---------------------------------------------------------------- F and candidates

@dataclass(frozen=True)
class CandidateSet:
    values: tuple
    vectors: tuple
    ceiling: object

    def __contains__(self, y) -> bool:
        return any(v == y for v in self.values)

    def __len__(self):
        return len(self.values)


def _candidates(M: LatticeBasis, body: ConvexBody, Y, budget: int) -> list[LatticePoint]:
    delta = geo.difference_body(body)
    return points_in_region(M, Region(delta, 0, Y, False, True), budget)


def candidate_values(M: LatticeBasis, body: ConvexBody, Y, budget: int = DEFAULT_BUDGET) -> CandidateSet:
    """Distinct y in (0, Y] carried by lattice points (x, y) with x in the difference body."""
    if Y <= 0:
        raise ValueError("ceiling must be positive")
    pts = _candidates(M, body, Y, budget)
    values, vectors = [], []
    for p in pts:
        if values and p.y == values[-1]:
            vectors[-1].append(p.vector)
        else:
            values.append(p.y)
            vectors.append([p.vector])
    return CandidateSet(tuple(values), tuple(tuple(v) for v in vectors), Y)


@dataclass(frozen=True)
class FResult:
    y: object
    witnesses: tuple


def _check_interior(body: ConvexBody, t) -> None:
    if len(t) != body.dim:
        raise ValueError("t has the wrong dimension")
    if not body.interior().contains(tuple(t)):
        raise ValueError(f"t = {tuple(float(v) for v in t)} is not in the interior of the body")


def _resolve(M: LatticeBasis, body: ConvexBody, pts: list[LatticePoint], X: np.ndarray, Yv: np.ndarray,
             t, marg: np.ndarray):
    """Smallest-y candidate(s) with x + t in the body, or None."""
    tf = np.array([float(v) for v in t])
    Xs = X + tf
    maybe = body.contains_float(Xs, 1e-7)
    idx = np.nonzero(maybe)[0]
    best = None
    wit = []
    for i in idx:
        if best is not None and Yv[i] > float(best) + 1e-9:
            break
        p = pts[i]
        if M.exact is None:
            ok = body.contains(tuple(float(a) + float(b) for a, b in zip(p.x, t)))
        else:
            ok = body.contains_float(Xs[i:i + 1], -marg[i])[0] or body.contains(_shifted(p.x, t))
        if not ok:
            continue
        if best is None or p.y < best:
            best, wit = p.y, [p.vector]
        elif p.y == best:
            wit.append(p.vector)
    if best is None:
        return None
    return FResult(best, tuple(wit))


def F_batch(M: LatticeBasis, body: ConvexBody, ts: Sequence, budget: int = DEFAULT_BUDGET,
            check_interior: bool = True, y_start: float = 1.0) -> list[FResult]:
    """F(M, t) for every t, sharing one candidate enumeration; Y doubles until all resolve."""
    if M.dim != body.dim:
        raise ValueError("dimension mismatch between basis and body")
    ts = [tuple(t) for t in ts]
    if check_interior:
        for t in ts:
            _check_interior(body, t)
    results: list = [None] * len(ts)
    Y = Fraction(y_start)
    while True:
        pts = _candidates(M, body, Y, budget)
        if pts:
            X = np.array([[float(v) for v in p.x] for p in pts])
            Yv = np.array([float(p.y) for p in pts])
            marg = 1e-11 * (1.0 + np.abs(np.array([p.coords for p in pts], dtype=np.float64)) @
                            np.abs(M.float).max(axis=1))
            for k, t in enumerate(ts):
                if results[k] is None:
                    results[k] = _resolve(M, body, pts, X, Yv, t, marg)
        if all(r is not None for r in results):
            return results
        Y *= 2
        if Y > Y_CAP:
            raise BudgetExceeded(f"F search exceeded the ceiling {Y_CAP:g}")


def F_value(M: LatticeBasis, body: ConvexBody, t, budget: int = DEFAULT_BUDGET) -> FResult:
    """F(M, t) = min{ y > 0 : (x, y) in Z^{d+1} M, x + t in the body }, for t interior."""
    return F_batch(M, body, [t], budget)[0]


# ---------------------------------------------------------------- shortest vectors, covering

def shortest_vector(M: LatticeBasis, budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, float]:
    """A shortest non-zero vector of Z^{d+1} M (Euclidean norm), by bounded enumeration."""
    if M.n > 4:
        raise ValueError("exact enumeration is limited to d + 1 <= 4")
    U, R = M.reduced()
    r0 = float(np.sqrt((R**2).sum(axis=1)).min())
    lo = np.full(M.n, -r0 * (1 + 1e-9))
    best_vec, best = None, math.inf
    for npr, P, _, _ in _enumerate_box(M, lo, -lo, budget):
        norms = np.sqrt((P**2).sum(axis=1))
        norms[np.all(npr == 0, axis=1)] = math.inf
        i = int(np.argmin(norms))
        if norms[i] < best:
            best, best_vec = float(norms[i]), P[i].copy()
    return best_vec, best


def covering_radius_estimate(M: LatticeBasis, body: ConvexBody, grid_n: int, height=1,
                             rel_tol: float = 1e-6, budget: int = DEFAULT_BUDGET) -> float:
    """Grid lower bound for the covering radius of A = body x (0, height].

    For each target p on a grid_n^{d+1} grid of the fundamental cell, find
    by bisection the least theta with p in theta*A + lattice; the maximum of
    the certified lower brackets bounds the true radius from below.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    height = geo.to_rational(height)
    d = M.dim
    best = 0.0
    use_exact = M.exact is not None
    basis = M.exact if use_exact else M.float
    for g in itertools.product(range(grid_n), repeat=d + 1):
        if use_exact:
            gf = [Fraction(v, grid_n) for v in g]
            p = [_sum_exact(_mul(gf[i], basis[i][j]) for i in range(d + 1)) for j in range(d + 1)]
            p = [Fraction(float(v)) if isinstance(v, LinearForm) else v for v in p]
        else:
            p = list(np.array(g, dtype=np.float64) / grid_n @ M.float)
            p = [Fraction(float(v)) for v in p]

        def covered(theta: Fraction) -> bool:
            # some lattice v with p - v in theta * A, i.e. v in (p_x - theta D) x [p_y - theta h, p_y)
            xb = body.affine(-theta, p[:d])
            reg = Region(xb, p[d] - theta * height, p[d], True, False)
            return bool(points_in_region(M, reg, budget))

        hi = Fraction(1)
        while not covered(hi):
            hi *= 2
        lo = Fraction(0)
        while hi - lo > rel_tol * hi:
            mid = (lo + hi) / 2
            mid = Fraction(float(mid)).limit_denominator(1 << 40)
            if covered(mid):
                hi = mid
            else:
                lo = mid
        best = max(best, float(lo))
    return best


def boundary_clearance(M: LatticeBasis, body: ConvexBody, t, kappa, tol: float = 1e-9,
                       budget: int = DEFAULT_BUDGET) -> tuple[bool, float]:
    """Whether no non-zero lattice point lies within tol of the boundary of (D - t) x [0, kappa]."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    d = M.dim
    tf = np.array([float(v) for v in t])
    lo_b, hi_b = body.bbox()
    lo = np.array([float(v) for v in lo_b] + [0.0]) - np.append(tf, 0.0) - 1e-6
    hi = np.array([float(v) for v in hi_b] + [float(kappa)]) - np.append(tf, 0.0) + 1e-6
    best = math.inf
    for npr, P, _, _ in _enumerate_box(M, lo, hi, budget):
        nz = ~np.all(npr == 0, axis=1)
        P = P[nz]
        if len(P) == 0:
            continue
        sx = body.signed_distance(P[:, :d] + tf)
        sy = np.maximum(-P[:, d], P[:, d] - float(kappa))
        outside = np.maximum(sx, 0.0) ** 2 + np.maximum(sy, 0.0) ** 2
        sd = np.where((sx > 0) | (sy > 0), np.sqrt(outside), np.maximum(sx, sy))
        best = min(best, float(np.abs(sd).min()))
    return best > tol, best
