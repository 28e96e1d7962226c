"""Vectors alpha with a rational relation Q alpha - B beta in Z^d.

Covers the integer sumsets that control which multiples of beta occur,
the decomposition of S(alpha, D_T) into a structured bulk S' and a bounded
remainder S'', and a fuzzer for the Chevallier box bound.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import geometry as geo
from .circleset import RationalBeta, spectrum
from .reals import LinearForm, RandomGen, sqrt_form
from .steinhaus import gap_count

SUMSET_BUDGET = 10**6


# ---------------------------------------------------------------- sumsets

@dataclass(frozen=True)
class SumsetSpec:
    q: tuple[int, ...]
    C: tuple[int, ...]
    D: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(int(v) for v in self.q))
        object.__setattr__(self, "C", tuple(int(v) for v in self.C))
        object.__setattr__(self, "D", tuple(int(v) for v in self.D))
        k = len(self.q)
        if k < 2 or len(self.C) != k or len(self.D) != k:
            raise ValueError("need k >= 2 and matching q, C, D")
        if any(v < 1 for v in self.q):
            raise ValueError("q_i must be positive")
        w = max(self.q)
        if any(d - c < w for c, d in zip(self.C, self.D)):
            raise ValueError("window condition D_i - C_i >= max q_j fails")

    @property
    def r(self) -> int:
        return math.gcd(*self.q)

    @property
    def Csum(self) -> int:
        return sum(c * q for c, q in zip(self.C, self.q))

    @property
    def Dsum(self) -> int:
        return sum(d * q for d, q in zip(self.D, self.q))

    @property
    def chain(self) -> int:
        """sum_{i<k} q_i q_{i+1}."""
        return sum(a * b for a, b in zip(self.q, self.q[1:]))


def sumset(spec: SumsetSpec, budget: int = SUMSET_BUDGET) -> list[int]:
    """{sum a_i q_i : C_i <= a_i <= D_i}, by brute force over every coefficient."""
    size = math.prod(d - c + 1 for c, d in zip(spec.C, spec.D))
    if size > budget:
        raise geo.BudgetExceeded(f"{size} coefficient vectors exceed the budget {budget}")
    grids = np.meshgrid(*[np.arange(c, d + 1, dtype=np.int64) * q
                          for q, c, d in zip(spec.q, spec.C, spec.D)], indexing="ij")
    return np.unique(sum(grids).ravel()).tolist()


@dataclass
class InclusionResult:
    outer_ok: bool
    inner_ok: bool
    inner_window: tuple[int, int]
    missing: list[int] = field(default_factory=list)
    stray: list[int] = field(default_factory=list)


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def inclusion_check(spec: SumsetSpec, budget: int = SUMSET_BUDGET) -> InclusionResult:
    """Check both window inclusions of the sumset against the brute-force set.

    outer: every element is mr with C/r <= m <= D/r.
    inner: every mr with C/r + chain/r^2 <= m <= D/r - chain/r^2 is an element.
    """
    A = sumset(spec, budget)
    r = spec.r
    lo, hi = Fraction(spec.Csum, r), Fraction(spec.Dsum, r)
    stray = [a for a in A if a % r or not lo <= Fraction(a, r) <= hi]
    pad = Fraction(spec.chain, r * r)
    m0, m1 = _ceil(lo + pad), _floor(hi - pad)
    have = set(A)
    missing = [m * r for m in range(m0, m1 + 1) if m * r not in have]
    return InclusionResult(not stray, not missing, (m0, m1), missing, stray)


def random_sumset_spec(rng: np.random.Generator, k_max: int = 4, q_max: int = 12) -> SumsetSpec:
    k = int(rng.integers(2, k_max + 1))
    # a common factor now and then makes r > 1
    g = int(rng.integers(2, 4)) if rng.random() < 0.3 else 1
    q = g * rng.integers(1, q_max // g + 1, size=k)
    w = int(q.max())
    C = rng.integers(-6, 7, size=k)
    D = C + w + rng.integers(0, 6, size=k)
    return SumsetSpec(tuple(q.tolist()), tuple(C.tolist()), tuple(D.tolist()))


# ---------------------------------------------------------------- Chevallier

def chevallier_bound(N: Sequence[int]) -> int:
    """prod_{i<d} N_i + 3 prod_{i<d-1} N_i + 1 for the box [0, N_1) x ... x [0, N_d).

    For d = 1 this returns 3, the three gap theorem, instead of the
    formula's literal value 5.
    """
    N = [int(v) for v in N]
    if not N or any(v < 1 for v in N):
        raise ValueError("N must be a non-empty vector of positive integers")
    d = len(N)
    if d == 1:
        return 3
    return math.prod(N[: d - 1]) + 3 * math.prod(N[: d - 2]) + 1


@dataclass
class FuzzTrial:
    trial: int
    seed: list
    kind: str
    d: int
    N: tuple[int, ...]
    G: int
    bound: int

    @property
    def ok(self) -> bool:
        return self.G <= self.bound


@dataclass
class FuzzReport:
    trials: list[FuzzTrial]

    @property
    def violations(self) -> list[FuzzTrial]:
        return [t for t in self.trials if not t.ok]

    def to_json(self) -> dict:
        return {"n_trials": len(self.trials), "violations": len(self.violations),
                "trials": [{"trial": t.trial, "seed": t.seed, "kind": t.kind, "N": list(t.N),
                            "G": t.G, "bound": t.bound} for t in self.trials]}


def random_relation(rng: np.random.Generator, d: int, Q_max: int = 6, B_max: int = 5) -> RationalBeta:
    while True:
        B = [int(v) * (1 if rng.random() < 0.8 else -1) for v in rng.integers(1, B_max + 1, size=d)]
        if math.gcd(*B) == 1:
            break
    Q = int(rng.integers(1, Q_max + 1))
    s = [Fraction(int(rng.integers(0, Q)), Q) for _ in range(d)]
    beta = sqrt_form(int(rng.choice([2, 3, 5, 6, 7, 10, 11])))
    return RationalBeta(Q, tuple(B), tuple(s), beta)


def _fuzz_alpha(rng: np.random.Generator, d: int, kind: str, seed_base: int):
    if kind == "random":
        return [LinearForm.generator(RandomGen(seed_base * 16 + i)) for i in range(d)], None
    if kind == "rational_beta":
        rel = random_relation(rng, d)
        return list(rel.alpha()), rel
    q = int(rng.integers(1, 20))
    return [Fraction(int(rng.integers(0, q)), q) for _ in range(d)], None


def chevallier_fuzz(trials: int, d_range: Sequence[int] = (2, 3), N_max: int = 12, seed: int = 0,
                    kinds: Sequence[str] = ("random", "rational_beta", "rational"),
                    weights: Sequence[float] = (0.45, 0.45, 0.10)) -> FuzzReport:
    """G(alpha, [0, N_1) x ... x [0, N_d)) against chevallier_bound(N).

    Trial t draws from the generator seeded with (seed, t), so any single
    trial can be replayed.
    """
    out = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        d = int(rng.choice(list(d_range)))
        kind = str(rng.choice(list(kinds), p=np.array(weights) / sum(weights)))
        N = tuple(int(v) for v in rng.integers(1, N_max + 1, size=d))
        alpha, rel = _fuzz_alpha(rng, d, kind, seed * 100003 + t)
        G = gap_count(alpha, geo.unit_box(d), N, rel).G
        out.append(FuzzTrial(t, [seed, t], kind, d, N, G, chevallier_bound(N)))
    return FuzzReport(out)


# ---------------------------------------------------------------- decomposition of S(alpha, D_T)

@dataclass(frozen=True)
class DecompositionSpec:
    """M_i = A_i Q + R_i with A_i >= 0 and 1 <= R_i <= Q."""

    relation: RationalBeta
    M: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "M", tuple(int(v) for v in self.M))
        if len(self.M) != self.relation.d:
            raise ValueError("M and the relation have different dimensions")
        if any(v < 1 for v in self.M):
            raise ValueError("M_i must be positive")
        if any(b == 0 for b in self.relation.B):
            raise ValueError("B_i = 0 makes alpha_i rational; drop that coordinate")

    @property
    def Q(self) -> int:
        return self.relation.Q

    @property
    def R(self) -> tuple[int, ...]:
        return tuple((m - 1) % self.Q + 1 for m in self.M)

    @property
    def A(self) -> tuple[int, ...]:
        return tuple((m - r) // self.Q for m, r in zip(self.M, self.R))


def reflect(rel: RationalBeta) -> tuple[RationalBeta, tuple[int, ...]]:
    """Replace alpha_i by -alpha_i wherever B_i < 0.

    Under m_i -> M_i + 1 - m_i the point set only rotates, so the gaps are
    unchanged.  Returns the positive relation and the flipped indices.
    """
    flip = tuple(i for i, b in enumerate(rel.B) if b < 0)
    B = tuple(abs(b) for b in rel.B)
    s = tuple(-v if i in flip else v for i, v in enumerate(rel.s))
    return RationalBeta(rel.Q, B, s, rel.beta), flip


def C_bound(B: Sequence[int], Q: int) -> int:
    """Number of (m, r) pairs left outside the bulk window: m below L0 or
    above D_empty - L0 (up to D_empty + sum B), times Q^d choices of r."""
    B = [abs(int(b)) for b in B]
    L0 = sum(a * b for a, b in zip(B, B[1:]))
    return (2 * L0 + sum(B)) * Q ** len(B)


def rational_gap_bound(rel: RationalBeta) -> int:
    """Q^d + 3 Q^{d-1} + 1 + 2 C(B, Q)."""
    Q, d = rel.Q, rel.d
    return Q**d + 3 * Q ** (d - 1) + 1 + 2 * C_bound(rel.B, Q)


@dataclass
class SubsetPiece:
    """S_I: m ranges over the set A_I (max D_I), r_i over [1, R_i] for i in I and [1, Q] otherwise."""

    I: tuple[int, ...]
    A_I: list[int]
    D_I: int
    r_hi: tuple[int, ...]
    keys: set


@dataclass
class Decomposition:
    spec: DecompositionSpec
    flipped: tuple[int, ...]
    pieces: list[SubsetPiece]
    S: set
    S_prime: set
    S_second: set
    bulk_window: tuple[int, int]
    C: int
    degenerate: bool
    union_ok: bool
    direct_ok: bool

    @property
    def ok(self) -> bool:
        # the count bound on S'' is only claimed when min A > max B
        small = self.degenerate or len(self.S_second) <= self.C
        return self.union_ok and self.direct_ok and self.S_prime <= self.S and small


def _keys(rel: RationalBeta, m: np.ndarray, r: np.ndarray) -> set:
    """Point m beta + sum r_i alpha_i mod 1 as (Q m + sum r_i B_i, sum r_i Q s_i mod Q)."""
    Q = rel.Q
    B = np.array(rel.B, dtype=np.int64)
    Qs = np.array([int(Q * v) for v in rel.s], dtype=np.int64)
    k0 = Q * m[:, None] + (r @ B)[None, :]
    k1 = np.broadcast_to(((r @ Qs) % Q)[None, :], k0.shape)
    return set(zip(k0.ravel().tolist(), k1.ravel().tolist()))


def _r_grid(hi: Sequence[int]) -> np.ndarray:
    return np.array(list(itertools.product(*[range(1, h + 1) for h in hi])), dtype=np.int64).reshape(-1, len(hi))


def _direct_keys(spec: DecompositionSpec, rel: RationalBeta, flipped: tuple[int, ...]) -> set:
    """Keys of the original S(alpha, D_T) over m in [1, M]^d, from exact points on the circle,
    moved by the rotation that the reflection introduces."""
    orig = spec.relation
    d = orig.d
    pts = np.array(list(itertools.product(*[range(1, m + 1) for m in spec.M])), dtype=np.int64)
    rep = spectrum(orig.alpha(), pts, orig)
    Q = orig.Q
    shift0 = sum((spec.M[i] + 1) * rel.B[i] for i in flipped)
    shift1 = sum((spec.M[i] + 1) * int(Q * rel.s[i]) for i in flipped)
    out = set()
    for x in rep.points:
        a, b = orig.canonical(x)
        k0, k1 = a * Q, b * Q
        if k0.denominator != 1 or k1.denominator != 1:
            raise ArithmeticError("point does not have the expected form")
        out.add((int(k0) + shift0, (int(k1) + shift1) % Q))
    return out


def decompose_S(spec: DecompositionSpec) -> Decomposition:
    """Split S(alpha, D_T), D = [0, 1)^d and T = M, into the pieces S_I and into S' and S''.

    The box is read as m_i in [1, M_i], a translate of [0, M_i) whose point
    set is a rotation of the original.  Each S_I is built from its
    description; their union is compared with S computed on the circle.
    """
    rel, flipped = reflect(spec.relation)
    d, Q = rel.d, rel.Q
    if d < 2:
        raise ValueError("the decomposition needs d >= 2")
    A, R, B = spec.A, spec.R, rel.B
    pieces = []
    for size in range(d + 1):
        for I in itertools.combinations(range(d), size):
            ranges = [np.array([A[i] * B[i]]) if i in I else np.arange(A[i], dtype=np.int64) * B[i]
                      for i in range(d)]
            if any(len(x) == 0 for x in ranges):
                continue
            A_I = np.unique(sum(np.meshgrid(*ranges, indexing="ij")).ravel())
            D_I = sum(A[i] * B[i] if i in I else (A[i] - 1) * B[i] for i in range(d))
            r_hi = tuple(R[i] if i in I else Q for i in range(d))
            pieces.append(SubsetPiece(I, A_I.tolist(), D_I, r_hi, _keys(rel, A_I, _r_grid(r_hi))))
    S = set().union(*(p.keys for p in pieces))
    direct = _direct_keys(spec, rel, flipped)
    L0 = sum(a * b for a, b in zip(B, B[1:]))
    D0 = sum((a - 1) * b for a, b in zip(A, B))
    degenerate = min(A) <= max(B)
    if degenerate:
        S_prime, window = set(), (0, -1)
    else:
        window = (L0, D0 - L0)
        S_prime = _keys(rel, np.arange(L0, D0 - L0 + 1, dtype=np.int64), _r_grid((Q,) * d))
    return Decomposition(spec, flipped, pieces, S, S_prime, S - S_prime, window, C_bound(B, Q),
                         degenerate, S == direct, len(direct) == len(S))


# ---------------------------------------------------------------- the bounded-G experiment

@dataclass
class GridScan:
    T_max: int
    max_G: int
    argmax: tuple[int, ...]
    bound: int
    n_runs: int


def bounded_gap_scan(rel: RationalBeta, T_max: int, T_min: int = 1) -> GridScan:
    """max G(alpha, [0, 1)^d dilated by T) over the integer grid [T_min, T_max]^d."""
    alpha = rel.alpha()
    body = geo.unit_box(rel.d)
    best, arg, n = -1, (), 0
    for T in itertools.product(range(T_min, T_max + 1), repeat=rel.d):
        G = gap_count(alpha, body, T, rel).G
        n += 1
        if G > best:
            best, arg = G, T
    return GridScan(T_max, best, arg, rational_gap_bound(rel), n)
