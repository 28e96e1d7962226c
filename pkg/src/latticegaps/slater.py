"""First return times of the translation q -> q + alpha on the torus."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import geometry as geo
from .geometry import ConvexBody
from .latticecore import F_batch, F_value, candidate_values, slater_basis
from .reals import LinearForm, RandomGen, as_exact

DEFAULT_CAP = 10**6


class ReturnCapExceeded(RuntimeError):
    """No return within the iteration cap."""


@dataclass
class ReturnRecord:
    params: tuple
    L_lower: int
    L_upper: int
    n_candidates: int
    samples: int
    max_tau: int
    failures: int = 0

    def row(self) -> list:
        return [*(str(p) for p in self.params), self.L_lower, self.L_upper, self.max_tau, self.failures]


def _vec(x) -> tuple:
    out = []
    for v in x:
        e = as_exact(v)
        out.append(e.to_fraction() if e is not None and e.is_rational else (e if e is not None else float(v)))
    return tuple(out)


def _add(a, b):
    if as_exact(a) is not None and as_exact(b) is not None:
        s = LinearForm.coerce(as_exact(a)) + as_exact(b)
        return s.to_fraction() if s.is_rational else s
    return float(a) + float(b)


def return_time(q: Sequence, alpha: Sequence, body: ConvexBody, cap: int = DEFAULT_CAP,
                chunk: int = 8192) -> int:
    """min{n >= 1 : q + n alpha in body + Z^d}, by iteration with exact settling.

    Each coordinate of the body must have width at most 1, so at most two
    integer translates per coordinate can meet it.
    """
    q, alpha = _vec(q), _vec(alpha)
    d = body.dim
    if len(q) != d or len(alpha) != d:
        raise ValueError("dimension mismatch")
    lo, hi = body.bbox()
    if any(b - a > 1 for a, b in zip(lo, hi)):
        raise ValueError("body must fit in a fundamental domain (coordinate widths <= 1)")
    if not body.contains(q):
        raise ValueError("q must lie in the body")
    qf = np.array([float(v) for v in q])
    af = np.array([float(v) for v in alpha])
    lof = np.array([float(v) for v in lo])
    start = 1
    while start <= cap:
        n = np.arange(start, min(start + chunk, cap + 1), dtype=np.float64)
        X = qf + n[:, None] * af
        z = np.floor(X - lof)
        marg = 1e-7 + 1e-12 * (1.0 + float(n[-1]) * float(np.abs(af).sum()))
        # z puts the point in [lo, lo + 1); the neighbours cover rounding
        hits = np.zeros(len(n), dtype=bool)
        for shift in (0.0, -1.0, 1.0):
            hits |= body.contains_float(X - (z + shift), marg)
        for i in np.nonzero(hits)[0]:
            nn = int(n[i])
            for shift in (0, -1, 1):
                zz = [int(v) + shift for v in z[i]]
                if _settle(q, alpha, nn, zz, body):
                    return nn
        start += chunk
    raise ReturnCapExceeded(f"no return within {cap} steps")


def _settle(q, alpha, n, z, body) -> bool:
    pt = tuple(_add(_add(qi, (as_exact(ai) * n if as_exact(ai) is not None else float(ai) * n)), -zi)
               for qi, ai, zi in zip(q, alpha, z))
    return body.contains(pt)


def return_time_via_F(q: Sequence, alpha: Sequence, body: ConvexBody, B) -> object:
    """(det B)^{-1} F(A~_B, q B^{-1}) where body is the undilated D and q lies in D_B."""
    d = body.dim
    if isinstance(B, (int, Fraction, str, float)):
        B = (B,) * d
    B = tuple(geo.to_rational(b) for b in B)
    det = math.prod(B)
    M = slater_basis(alpha, B)
    t = tuple(_div(v, b) for v, b in zip(_vec(q), B))
    y = F_value(M, body, t).y
    return _div(y, det)


def returns_via_F(qs: Sequence, alpha: Sequence, body: ConvexBody, B) -> list:
    d = body.dim
    B = tuple(geo.to_rational(b) for b in B)
    det = math.prod(B)
    M = slater_basis(alpha, B)
    ts = [tuple(_div(v, b) for v, b in zip(_vec(q), B)) for q in qs]
    return [_div(r.y, det) for r in F_batch(M, body, ts)]


def _div(v, b):
    e = as_exact(v)
    if e is None:
        return float(v) / float(b)
    r = e / Fraction(b)
    return r.to_fraction() if r.is_rational else r


def sample_grid(body: ConvexBody, grid_n: int) -> list[tuple[Fraction, ...]]:
    """Cell centres of a grid_n^d grid over the bounding box that fall in the interior."""
    lo, hi = body.bbox()
    inner = body.interior()
    out = []
    for idx in np.ndindex(*([grid_n] * body.dim)):
        p = tuple(a + (b - a) * Fraction(2 * i + 1, 2 * grid_n) for a, b, i in zip(lo, hi, idx))
        if inner.contains(p):
            out.append(p)
    return out


def distinct_return_count(alpha: Sequence, body: ConvexBody, shrink, grid_n: int,
                          cap: int = DEFAULT_CAP, probe: bool = True) -> ReturnRecord:
    """Bracket the number of distinct return times to D_B, with B = shrink.

    L_lower counts distinct return times at sampled q.  L_upper counts the
    observed values together with candidate values, below the largest one
    observed, that a single probe point shows to be attained.
    n_candidates is the raw size of that candidate set.
    """
    d = body.dim
    if isinstance(shrink, (int, Fraction, str, float)):
        shrink = (shrink,) * d
    B = tuple(geo.to_rational(b) for b in shrink)
    DB = geo.dilate(body, B)
    taus, failures = [], 0
    for q in sample_grid(DB, grid_n):
        try:
            taus.append(return_time(q, alpha, DB, cap))
        except geo.BudgetExceeded:
            failures += 1
        except ReturnCapExceeded:
            failures += 1
    if not taus:
        return ReturnRecord(B, 0, 0, 0, 0, 0, failures)
    observed = set(taus)
    max_tau = max(taus)
    n_cand = 0
    attained = set(observed)
    if probe:
        det = math.prod(B)
        M = slater_basis(alpha, B)
        cands = candidate_values(M, body, max_tau * det)
        n_cand = len(cands)
        c = body.interior_point()
        inner = body.interior()
        probes, labels = [], []
        for y, vecs in zip(cands.values, cands.vectors):
            n = Fraction(y) / det
            if n in attained or n.denominator != 1:
                continue
            x = vecs[0][:d]
            t = tuple(_add(ci, _div(xi, -2)) for ci, xi in zip(c, x))
            if inner.contains(t):
                probes.append(t)
                labels.append(y)
        if probes:
            for y, r in zip(labels, F_batch(M, body, probes, check_interior=False)):
                if r.y == y:
                    attained.add(int(Fraction(y) / det))
    return ReturnRecord(B, len(observed), len(attained), n_cand, len(taus), max_tau, failures)


def random_instance(rng: np.random.Generator, d: int) -> tuple[tuple, list, ConvexBody, tuple]:
    """(q, alpha, D, B) with q interior to D_B; D has coordinate widths at most 1."""
    alpha = [LinearForm.generator(RandomGen(int(rng.integers(2**62)))) for _ in range(d)]
    body = geo.random_body(rng, d)
    B = tuple(Fraction(1, int(rng.integers(2, 9))) for _ in range(d))
    if isinstance(body, geo.Ball):
        B = (B[0],) * d
    q = geo.random_interior_point(rng, geo.dilate(body, B))
    return q, alpha, body, B
