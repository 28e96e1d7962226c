"""Gap counts G(alpha, D_T) and the gaps s_{k,T}, computed directly on the
circle and again through the lattice function F."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import geometry as geo
from .circleset import GapReport, distinct_count_numeric, spectrum
from .geometry import BudgetExceeded, ConvexBody
from .latticecore import (
    F_batch,
    LatticeBasis,
    candidate_values,
    shortest_vector,
    steinhaus_basis,
)
from .reals import LinearForm, RandomGen, as_exact


@dataclass
class ScanRecord:
    params: tuple
    G: int
    n_points: int
    max_gap: float
    min_gap: float
    identity_checked: bool = False
    sv_norm: float = float("nan")
    status: str = "ok"

    def row(self) -> list:
        return [*(str(p) for p in self.params), self.n_points, self.G,
                f"{self.max_gap:.12g}", f"{self.min_gap:.12g}", f"{self.sv_norm:.12g}", self.status]


def _factors(T, d: int) -> tuple[Fraction, ...]:
    if isinstance(T, (int, float, Fraction, str)):
        T = (T,) * d
    T = tuple(geo.to_rational(t) for t in T)
    if len(T) != d:
        raise ValueError("dilation has the wrong dimension")
    return T


def _is_numeric(alpha) -> bool:
    return any(as_exact(a) is None for a in alpha)


def points(body: ConvexBody, T, budget: int = geo.DEFAULT_BUDGET) -> np.ndarray:
    return geo.lattice_points(geo.dilate(body, _factors(T, body.dim)), budget)


def gap_report(alpha: Sequence, body: ConvexBody, T, rel=None, budget: int = geo.DEFAULT_BUDGET) -> GapReport:
    pts = points(body, T, budget)
    if len(pts) == 0:
        raise ValueError("the dilated body contains no integer points")
    return spectrum(alpha, pts, rel)


def gap_count(alpha: Sequence, body: ConvexBody, T, rel=None, budget: int = geo.DEFAULT_BUDGET) -> ScanRecord:
    """G(alpha, D_T) with exact gap classes (numeric bracket for float alpha)."""
    T = _factors(T, body.dim)
    if _is_numeric(alpha):
        pts = points(body, T, budget)
        a = np.array([float(v) for v in alpha])
        vals = np.sort(np.unique(np.mod(pts @ a, 1.0)))
        gaps = np.diff(np.append(vals, vals[0] + 1.0))
        return ScanRecord(T, distinct_count_numeric(gaps), len(pts), float(gaps.max()), float(gaps.min()),
                          status="numeric")
    rep = gap_report(alpha, body, T, rel, budget)
    return ScanRecord(T, rep.count, rep.n_points, rep.max_gap, rep.min_gap)


def gap_after(alpha: Sequence, body: ConvexBody, T, k, rel=None) -> LinearForm:
    """s_{k,T}: the gap between k.alpha mod 1 and its successor in S(alpha, D_T)."""
    T = _factors(T, body.dim)
    k = tuple(int(v) for v in k)
    if not geo.dilate(body, T).contains(k):
        raise ValueError(f"{k} is not a lattice point of the dilated body")
    return gap_report(alpha, body, T, rel).gap_after(k)


def identity_body(body: ConvexBody, T) -> ConvexBody:
    """A body D' with the same integer points in D'_T as D_T, all of them interior.

    Every k/T is then an interior point of D', as F requires; the same D'
    is used for both sides of the identity, so nothing compared changes.
    """
    T = _factors(T, body.dim)
    inner = geo.interiorize(geo.dilate(body, T))
    return geo.dilate(inner, tuple(1 / t for t in T))


def gap_after_via_F(alpha: Sequence, body: ConvexBody, T, k, budget: int = 2 * 10**6) -> LinearForm:
    """(det T)^{-1} F(A_T, k T^{-1}) evaluated on identity_body(body, T)."""
    return gaps_via_F(alpha, body, T, [k], budget)[0]


def gaps_via_F(alpha: Sequence, body: ConvexBody, T, ks: Iterable, budget: int = 2 * 10**6) -> list:
    T = _factors(T, body.dim)
    det = math.prod(T)
    Dp = identity_body(body, T)
    M = steinhaus_basis(alpha, T)
    ks = [tuple(int(v) for v in k) for k in ks]
    ts = [tuple(Fraction(v) / t for v, t in zip(k, T)) for k in ks]
    res = F_batch(M, Dp, ts, budget)
    out = []
    for r in res:
        y = r.y
        out.append(LinearForm.coerce(y) / det if as_exact(y) is not None else float(y) / float(det))
    return out


@dataclass
class IdentityResult:
    T: tuple
    n_points: int
    mismatches: int
    G: int
    n_candidates: int
    max_F: float
    det_ok: bool


def identity_check(alpha: Sequence, body: ConvexBody, T, rel=None, budget: int = 2 * 10**6) -> IdentityResult:
    """Compare every s_{k,T} with (det T)^{-1} F(A_T, k/T) exactly.

    Also records the size of the candidate set up to the largest F seen,
    which bounds the number of distinct gaps.
    """
    T = _factors(T, body.dim)
    Dp = identity_body(body, T)
    rep = spectrum(alpha, geo.lattice_points(geo.dilate(Dp, T)), rel)
    direct = rep.gaps
    via = gaps_via_F(alpha, body, T, rep.ms, budget)
    mismatches = sum(1 for a, b in zip(direct, via) if a != b)
    det = math.prod(T)
    max_F = max(via, key=float) * det
    M = steinhaus_basis(alpha, T)
    cands = candidate_values(M, Dp, max_F, budget)
    return IdentityResult(T, rep.n_points, mismatches, rep.count, len(cands), float(max_F),
                          M.det_certificate().ok)


def grid_vs_sampled(M: LatticeBasis, body: ConvexBody, R, n_samples: int, rng: np.random.Generator,
                    budget: int = 2 * 10**6) -> tuple[int, int, int]:
    """(G_R, G_union, n_candidates) for the values of F(M, .).

    G_R counts distinct F(M, k/R) over integer k in R D.  G_union adds F at
    random interior t.  n_candidates is the size of the candidate set up to
    the largest value seen, an upper bound for the number of values of F.
    """
    d = body.dim
    R = geo.to_rational(R)
    Dp = identity_body(body, R)
    ks = geo.lattice_points(geo.dilate(Dp, (R,) * d))
    ts = [tuple(Fraction(int(v)) / R for v in k) for k in ks]
    lo, hi = Dp.bbox()
    samples = []
    inner = Dp.interior()
    while len(samples) < n_samples:
        t = tuple(Fraction(float(a + (b - a) * rng.random())).limit_denominator(10**9) for a, b in zip(lo, hi))
        if inner.contains(t):
            samples.append(t)
    res = F_batch(M, Dp, ts + samples, budget)
    grid_vals = {r.y for r in res[: len(ts)]}
    all_vals = {r.y for r in res}
    ymax = max((r.y for r in res), key=float)
    cands = candidate_values(M, Dp, ymax, budget)
    return len(grid_vals), len(all_vals), len(cands)


def orbit_sv(alpha: Sequence, T) -> float:
    """Shortest-vector norm of the float lattice A_T (the orbit point matched to T)."""
    d = len(alpha)
    T = _factors(T, d)
    det = float(math.prod(T))
    rows = [[(1.0 / float(T[i]) if i == j else 0.0) for j in range(d)] + [float(alpha[i]) * det] for i in range(d)]
    rows.append([0.0] * d + [det])
    return shortest_vector(LatticeBasis(rows))[1]


def scan_homothetic(alpha: Sequence, body: ConvexBody, seq: Iterable, rel=None, with_sv: bool = False,
                    budget: int = geo.DEFAULT_BUDGET) -> list[ScanRecord]:
    """One record per dilation R_i of the body."""
    out = []
    for R in seq:
        R = geo.to_rational(R)
        try:
            rec = gap_count(alpha, body, (R,) * body.dim, rel, budget)
            rec.params = (R,)
            if with_sv:
                rec.sv_norm = orbit_sv(alpha, (R,) * body.dim)
        except BudgetExceeded:
            rec = ScanRecord((R,), 0, 0, float("nan"), float("nan"), status="budget")
        out.append(rec)
    return out


def integer_grid(T_max: int, d: int, T_min: int = 1) -> list[tuple[int, ...]]:
    axes = [range(T_min, T_max + 1)] * d
    return [tuple(t) for t in np.array(np.meshgrid(*axes, indexing="ij")).reshape(d, -1).T.tolist()]


def scan_diag(alpha: Sequence, body: ConvexBody, T_grid: Iterable, rel=None,
              budget: int = geo.DEFAULT_BUDGET) -> list[ScanRecord]:
    """One record per diagonal dilation T in the grid."""
    out = []
    for T in T_grid:
        T = _factors(T, body.dim)
        try:
            rec = gap_count(alpha, body, T, rel, budget)
        except BudgetExceeded:
            rec = ScanRecord(T, 0, 0, float("nan"), float("nan"), status="budget")
        out.append(rec)
    return out


def tail_min(records: Sequence[ScanRecord]) -> int:
    """Minimum of G over the last half of a scan (a liminf proxy)."""
    tail = [r.G for r in records[len(records) // 2:] if r.status == "ok"]
    return min(tail) if tail else 0


def max_G(records: Sequence[ScanRecord]) -> int:
    return max((r.G for r in records if r.status in ("ok", "numeric")), default=0)


def random_instance(rng: np.random.Generator, d: int, T_range=(2, 7)) -> tuple[list, ConvexBody, tuple]:
    """A random alpha, body and dilation with a few hundred lattice points at most."""
    alpha = [LinearForm.generator(RandomGen(int(rng.integers(2**62)))) for _ in range(d)]
    body = geo.random_body(rng, d)
    lo, hi = T_range
    T = Fraction(int(rng.integers(lo * 8, hi * 8 + 1)), 8)
    Ts = (T,) * d if isinstance(body, geo.Ball) else \
        tuple(Fraction(int(rng.integers(lo * 8, hi * 8 + 1)), 8) for _ in range(d))
    return alpha, body, Ts
