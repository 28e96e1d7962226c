"""Littlewood products, badly approximable statistics, subexponential
sequences and shortest vectors along the diagonal orbit."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import reals
from .geometry import BudgetExceeded
from .latticecore import LatticeBasis, dtheta, shortest_vector, steinhaus_basis
from .reals import THETA7, THETA7_SQ, CertificationError, Interval, LinearForm, as_exact

EPS = 2.0**-52


def cubic_pair() -> tuple[LinearForm, LinearForm]:
    """(theta, theta^2) for theta = 2cos(2pi/7)."""
    return LinearForm.generator(THETA7), LinearForm.generator(THETA7_SQ)


def norm_rz(x):
    """Distance to the nearest integer, exact for exact input."""
    e = as_exact(x)
    if e is None:
        x = float(x)
        return abs(x - round(x))
    f = e.frac()
    g = 1 - f
    return f if f <= g else g


def _is_numeric(alpha) -> bool:
    return any(as_exact(a) is None for a in alpha)


@dataclass
class ApproxStats:
    N: int
    littlewood_min: object
    littlewood_n: int
    bad_min: object
    bad_m: tuple

    def row(self) -> list:
        return [self.N, f"{float(self.littlewood_min):.12g}", self.littlewood_n,
                f"{float(self.bad_min):.12g}", " ".join(str(v) for v in self.bad_m)]


# ---------------------------------------------------------------- Littlewood

def _product_interval(n: int, dists: Sequence[LinearForm], p: int) -> Interval:
    out = Interval(n)
    for x in dists:
        iv = x.interval(p)
        out = out * Interval(max(iv.lo, Fraction(0)), iv.hi)
    return out


def littlewood_min(alpha: Sequence, N: int, chunk: int = 1 << 16) -> tuple[object, int]:
    """min over 2 <= n <= N of n * prod ||n alpha_i||, with the smallest witnessing n.

    A float scan brackets every product; the near-minimal ones are then
    separated with certified intervals of increasing precision.  The value
    is exact (0) when some ||n alpha_i|| vanishes, a float otherwise.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    af = np.array([float(a) for a in alpha])
    best_hi = math.inf
    cands: list[tuple[float, int]] = []
    for start in range(2, N + 1, chunk):
        n = np.arange(start, min(start + chunk, N + 1), dtype=np.float64)
        X = n[:, None] * af
        dist = np.abs(X - np.rint(X))
        err = 4 * EPS * (1 + np.abs(X)) + 1e-300
        lo = n * np.prod(np.maximum(dist - err, 0.0), axis=1)
        hi = n * np.prod(dist + err, axis=1)
        best_hi = min(best_hi, float(hi.min()))
        keep = np.nonzero(lo <= best_hi)[0]
        cands = [c for c in cands if c[0] <= best_hi] + [(float(lo[i]), int(n[i])) for i in keep]
    if _is_numeric(alpha):
        vals = [(float(n * np.prod([norm_rz(n * a) for a in af])), n) for _, n in cands]
        v, n = min(vals)
        return v, n
    return _certify_littlewood(alpha, sorted(n for _, n in cands))


def _certify_littlewood(alpha, ns: list[int]) -> tuple[object, int]:
    exact = [as_exact(a) for a in alpha]
    dists = {n: [norm_rz(a * n) for a in exact] for n in ns}
    zeros = [n for n in ns if any(not x.terms and x.const == 0 for x in dists[n])]
    if zeros:
        return Fraction(0), min(zeros)
    p = reals.DEFAULT_BITS
    live = list(ns)
    while p <= reals.MAX_BITS:
        ivs = {n: _product_interval(n, dists[n], p) for n in live}
        top = min(iv.hi for iv in ivs.values())
        live = [n for n in live if ivs[n].lo <= top]
        if len(live) == 1:
            iv = ivs[live[0]]
            return float((iv.lo + iv.hi) / 2), live[0]
        p *= 2
    raise CertificationError(f"Littlewood products of n in {live[:5]} not separated")


# ---------------------------------------------------------------- badly approximable

def _half_space(d: int, N: int, first: int) -> np.ndarray:
    """Integer vectors with first coordinate `first`, other entries in [-N, N],
    and positive leading non-zero entry."""
    if d == 1:
        return np.array([[first]], dtype=np.int64) if first > 0 else np.zeros((0, 1), dtype=np.int64)
    rest = np.array(np.meshgrid(*[np.arange(-N, N + 1)] * (d - 1), indexing="ij")).reshape(d - 1, -1).T
    if first == 0:
        nz = rest != 0
        lead = np.argmax(nz, axis=1)
        ok = nz.any(axis=1) & (rest[np.arange(len(rest)), lead] > 0)
        rest = rest[ok]
    return np.hstack([np.full((len(rest), 1), first, dtype=np.int64), rest])


def bad_approx_min(alpha: Sequence, N: int, budget: int = 5 * 10**7) -> tuple[object, tuple[int, ...]]:
    """min over 0 < |m|_inf <= N of ||m . alpha|| * |m|_inf^d and a witness m.

    Only one of m, -m is scanned.  For exact alpha the value is an exact
    linear form, chosen among float-bracketed candidates by exact comparison.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    d = len(alpha)
    if (2 * N + 1) ** d // 2 > budget:
        raise BudgetExceeded(f"(2N+1)^d exceeds the budget {budget}")
    af = np.array([float(a) for a in alpha])
    best_hi = math.inf
    cands: list[tuple[float, tuple]] = []
    for first in range(0, N + 1):
        m = _half_space(d, N, first)
        if len(m) == 0:
            continue
        X = m @ af
        dist = np.abs(X - np.rint(X))
        size = np.abs(m).max(axis=1).astype(np.float64) ** d
        err = (4 * EPS * (1 + np.abs(m) @ np.abs(af) + np.abs(X))) * size + 1e-300
        val = dist * size
        best_hi = min(best_hi, float((val + err).min()))
        keep = np.nonzero(val - err <= best_hi)[0]
        cands = [c for c in cands if c[0] <= best_hi] + [(float(val[i] - err[i]), tuple(int(v) for v in m[i]))
                                                          for i in keep]
    if _is_numeric(alpha):
        vals = [(float(norm_rz(float(np.dot(m, af))) * max(map(abs, m)) ** d), m) for _, m in cands]
        return min(vals)
    exact = [as_exact(a) for a in alpha]
    best, best_m = None, None
    for _, m in sorted(cands, key=lambda c: (max(map(abs, c[1])), c[1])):
        x = sum((a * c for a, c in zip(exact, m)), LinearForm.rational(0))
        v = norm_rz(x) * max(map(abs, m)) ** d
        if best is None or v < best:
            best, best_m = v, m
    return best, best_m


def approx_stats(alpha: Sequence, N: int, bad_N: int | None = None) -> ApproxStats:
    """Littlewood minimum up to N; the badly approximable minimum up to bad_N (default N)."""
    lw, n = littlewood_min(alpha, N)
    bad, m = bad_approx_min(alpha, N if bad_N is None else bad_N)
    return ApproxStats(N, lw, n, bad, m)


# ---------------------------------------------------------------- orbit tracking

@dataclass
class OrbitPoint:
    s: float
    theta: Fraction
    sv: float
    sv_dual: float

    def row(self) -> list:
        return [f"{self.s:.6g}", f"{self.sv:.12g}", f"{self.sv_dual:.12g}"]


def _flow_theta(s: float, max_den: int = 10**12) -> Fraction:
    # Phi^s = D(e^{-s}); a rational theta keeps the flowed basis exact
    if s == 0:
        return Fraction(1)
    return Fraction(math.exp(-s)).limit_denominator(max_den)


def dual_basis(alpha: Sequence) -> LatticeBasis:
    """(A_1)^{-t} = [[1, 0], [-alpha^t, 1]], written out exactly."""
    d = len(alpha)
    exact = all(as_exact(a) is not None for a in alpha)
    rows = [[Fraction(int(i == j)) for j in range(d + 1)] for i in range(d)]
    rows.append([(-as_exact(a) if exact else -float(a)) for a in alpha] + [Fraction(1)])
    return LatticeBasis(rows, "A_1^-t")


def orbit_track(alpha: Sequence, s_values: Sequence[float]) -> list[OrbitPoint]:
    """Shortest-vector norms of A_1 Phi^s and of its transpose inverse A_1^{-t} Phi^{-s}.

    Phi^s is realised as D(theta) with theta a rational approximation of
    e^{-s}, so both bases stay exact and the reduction sees no cancellation.
    """
    d = len(alpha)
    A = steinhaus_basis(alpha, (1,) * d)
    Ad = dual_basis(alpha)
    out = []
    for s in s_values:
        th = _flow_theta(float(s))
        sv = shortest_vector(A.multiply(dtheta(th, d)))[1]
        svd = shortest_vector(Ad.multiply(dtheta(1 / th, d)))[1]
        out.append(OrbitPoint(float(s), th, sv, svd))
    return out


# ---------------------------------------------------------------- subexponential sequences

SEQUENCE_KINDS = ("linear", "exp_sqrt", "power", "geometric")


def _raw_sequence(kind: str, count: int, h) -> list:
    idx = range(1, count + 1)
    if kind == "linear":
        h = Fraction(h)
        if h <= 0:
            raise ValueError("linear step must be positive")
        return [h * i for i in idx]
    if kind == "exp_sqrt":
        return [math.exp(math.sqrt(i)) for i in idx]
    if kind == "power":
        return [i**1.5 for i in idx]
    if kind == "geometric":
        h = Fraction(h)
        if h <= 1:
            raise ValueError("geometric ratio must exceed 1")
        return [h**i for i in idx]
    raise ValueError(f"unknown sequence kind {kind!r}; expected one of {SEQUENCE_KINDS}")


def check_subexponential(seq: Sequence, final_ratio: float | None = None) -> None:
    """Reject prefixes that are not increasing with strictly decreasing ratios.

    With final_ratio set, the last ratio must also fall below it.
    """
    if len(seq) < 3:
        raise ValueError("need at least three terms to see the ratios")
    if any(float(a) <= 0 for a in seq) or any(b <= a for a, b in zip(seq, seq[1:])):
        raise ValueError("sequence must be positive and increasing")
    ratios = [Fraction(b) / Fraction(a) for a, b in zip(seq, seq[1:])]
    if any(r2 >= r1 for r1, r2 in zip(ratios, ratios[1:])):
        raise ValueError("ratios R_{i+1}/R_i are not decreasing towards 1")
    if final_ratio is not None and ratios[-1] >= Fraction(final_ratio):
        raise ValueError(f"final ratio {float(ratios[-1]):.6g} is not below {final_ratio}")


def subexp_sequence(kind: str, count: int, h=1, final_ratio: float | None = None) -> list:
    if count < 2:
        raise ValueError("count must be at least 2")
    seq = _raw_sequence(kind, count, h)
    if count >= 3:
        check_subexponential(seq, final_ratio)
    elif kind == "geometric":
        raise ValueError("a geometric sequence has constant ratio")
    return seq
