"""Command-line front end.

Each command reads a JSON run config (``--config``), overridable by flags,
and writes CSV with a header row and a trailing ``# status: ok|partial``
line, or one JSON document.  Exit codes: 0 ok, 2 config error, 3 budget
exceeded (output flagged partial), 4 assertion or regression failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import diophantine, geometry as geo, latticecore, ratsum, reals, slater, steinhaus
from .circleset import RationalBeta
from .reals import THETA7, THETA7_SQ, LinearForm, RandomGen, sqrt_form

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_FAIL = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


class CheckFailed(AssertionError):
    pass


@dataclass
class RunConfig:
    command: str
    alpha: object = None
    body: dict | None = None
    dilation: object = None
    precision_bits: int = 128
    seed: int | None = None
    budget: int = 2 * 10**6
    output: str | None = None
    format: str = "csv"
    numeric_only: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ConfigError("precision_bits must be at least 64")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.seed is not None and not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def digest(self) -> str:
        payload = json.dumps({k: v for k, v in self.__dict__.items() if k not in ("output", "format")},
                             sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class Table:
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    status: str = "ok"
    extra: dict = field(default_factory=dict)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {"columns": self.columns, "rows": [[_cell(v) for v in r] for r in self.rows],
                   "status": self.status, **self.extra}
            return json.dumps(doc, indent=1, sort_keys=True) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_cell(v) for v in r])
        buf.write(f"# status: {self.status}\n")
        return buf.getvalue()


def _cell(v):
    if isinstance(v, (Fraction, LinearForm)):
        return str(v) if isinstance(v, Fraction) else f"{float(v):.15g}"
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, tuple):
        return " ".join(str(_cell(x)) for x in v)
    return v


# ---------------------------------------------------------------- config parsing

def _rational(x) -> Fraction:
    try:
        return geo.to_rational(x)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"not a rational number: {x!r}") from e


def parse_alpha(spec, cfg: RunConfig) -> tuple[list, RationalBeta | None]:
    """Tagged constructors only; decimals need numeric_only."""
    if spec is None:
        raise ConfigError("alpha is required")
    if isinstance(spec, dict):
        if "cubic7" in spec:
            return [LinearForm.generator(THETA7), LinearForm.generator(THETA7_SQ)], None
        if "rational_beta" in spec:
            rb = spec["rational_beta"]
            beta = _coordinate(rb.get("beta", {"sqrt": 2}), cfg, 0)
            if "Q" in rb:
                rel = RationalBeta(int(rb["Q"]), tuple(rb["B"]), tuple(_rational(v) for v in rb["s"]), beta)
            else:
                rel = RationalBeta.from_affine([_rational(v) for v in rb["r"]],
                                               [_rational(v) for v in rb["s"]], beta)
            return list(rel.alpha()), rel
        if "sqrt" in spec and isinstance(spec["sqrt"], list):
            return [sqrt_form(_rational(v)) for v in spec["sqrt"]], None
        if "random" in spec and isinstance(spec["random"], dict):
            d = int(spec["random"]["d"])
            return [_coordinate({"random": i}, cfg, i) for i in range(d)], None
        return [_coordinate(spec, cfg, 0)], None
    if isinstance(spec, list):
        return [_coordinate(v, cfg, i) for i, v in enumerate(spec)], None
    return [_coordinate(spec, cfg, 0)], None


def _coordinate(spec, cfg: RunConfig, i: int):
    if isinstance(spec, dict):
        if "sqrt" in spec:
            return sqrt_form(_rational(spec["sqrt"]))
        if "rational" in spec:
            return LinearForm.rational(_rational(spec["rational"]))
        if "random" in spec:
            if cfg.seed is None:
                raise ConfigError("a random alpha needs a seed")
            return LinearForm.generator(RandomGen(int(cfg.seed) * 1000 + int(spec["random"])))
        raise ConfigError(f"unknown alpha constructor {sorted(spec)}")
    if isinstance(spec, str) and "/" in spec:
        return LinearForm.rational(_rational(spec))
    if isinstance(spec, (int, float, str)):
        if not cfg.numeric_only:
            raise ConfigError("decimal alpha requires \"numeric_only\": true")
        return float(spec)
    raise ConfigError(f"cannot parse alpha coordinate {spec!r}")


def parse_body(spec) -> geo.ConvexBody:
    if spec is None:
        raise ConfigError("body is required")
    if spec in ("unit_square", "unit_box"):
        return geo.unit_box(2)
    if isinstance(spec, dict) and spec.get("shape") == "unit_box":
        return geo.unit_box(int(spec.get("d", 2)))
    try:
        return geo.body_from_json(spec)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad body: {e}") from e


def parse_dilation(spec, d: int) -> tuple[str, list]:
    """('homothetic', [R_i]) or ('diag', [T])."""
    if spec is None:
        raise ConfigError("dilation is required")
    if isinstance(spec, list):
        return "homothetic", [_rational(v) for v in spec]
    kind = next(iter(spec))
    arg = spec[kind]
    if kind == "grid":
        return "diag", steinhaus.integer_grid(int(arg["T_max"]), d, int(arg.get("T_min", 1)))
    if kind in diophantine.SEQUENCE_KINDS:
        try:
            seq = diophantine.subexp_sequence(kind, int(arg["count"]), arg.get("h", 1))
        except ValueError as e:
            raise ConfigError(str(e)) from e
        start = int(arg.get("start", 1))
        return "homothetic", [_rational(v) for v in seq[start - 1:]]
    raise ConfigError(f"unknown dilation kind {kind!r}")


def _rng(cfg: RunConfig, *extra) -> np.random.Generator:
    if cfg.seed is None:
        raise ConfigError("this command is randomized and needs a seed")
    return np.random.default_rng([int(cfg.seed), *extra])


def _pmap(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# ---------------------------------------------------------------- commands

def _scan_one(args):
    alpha, body, kind, T, rel, with_sv, budget = args
    if kind == "homothetic":
        return steinhaus.scan_homothetic(alpha, body, [T], rel, with_sv, budget)[0]
    return steinhaus.scan_diag(alpha, body, [T], rel, budget)[0]


def cmd_steinhaus_scan(cfg: RunConfig, jobs: int) -> Table:
    alpha, rel = parse_alpha(cfg.alpha, cfg)
    body = parse_body(cfg.body)
    if len(alpha) != body.dim:
        raise ConfigError("alpha and body dimensions differ")
    kind, seq = parse_dilation(cfg.dilation, body.dim)
    with_sv = bool(cfg.params.get("with_sv", False))
    recs = _pmap(_scan_one, [(alpha, body, kind, T, rel, with_sv, cfg.budget) for T in seq], jobs)
    cols = (["R"] if kind == "homothetic" else [f"T{i + 1}" for i in range(body.dim)])
    t = Table(cols + ["n_points", "G", "max_gap", "min_gap", "sv_norm", "status"], [r.row() for r in recs])
    if any(r.status == "budget" for r in recs):
        t.status = "partial"
    good = [r.G for r in recs if r.status in ("ok", "numeric")]
    t.extra = {"max_G": max(good, default=0)}
    return t


def cmd_slater_scan(cfg: RunConfig, jobs: int) -> Table:
    alpha, _ = parse_alpha(cfg.alpha, cfg)
    body = parse_body(cfg.body)
    shrinks = cfg.params.get("shrink", [])
    if not shrinks:
        raise ConfigError("slater-scan needs params.shrink, a list of B values")
    grid_n = int(cfg.params.get("grid_n", 8))
    cap = int(cfg.params.get("cap", slater.DEFAULT_CAP))
    t = Table([f"B{i + 1}" for i in range(body.dim)] + ["L_lower", "L_upper", "max_tau", "failures"])
    for s in shrinks:
        s = [_rational(v) for v in (s if isinstance(s, list) else [s] * body.dim)]
        rec = slater.distinct_return_count(alpha, body, tuple(s), grid_n, cap)
        t.rows.append(rec.row())
        if rec.failures:
            t.status = "partial"
    return t


def _identity_trial(args):
    seed, k, d_choices = args
    rng = np.random.default_rng([seed, k])
    d = int(rng.choice(d_choices))
    alpha, body, T = steinhaus.random_instance(rng, d)
    res = steinhaus.identity_check(alpha, body, T)
    return [k, d, type(body).__name__, tuple(T), res.n_points, res.G, res.n_candidates,
            res.mismatches, res.det_ok]


def cmd_identity_check(cfg: RunConfig, jobs: int) -> Table:
    cols = ["trial", "d", "body", "T", "n_points", "G", "n_candidates", "mismatches", "det_ok"]
    if cfg.alpha is not None:
        alpha, rel = parse_alpha(cfg.alpha, cfg)
        body = parse_body(cfg.body)
        kind, seq = parse_dilation(cfg.dilation, body.dim)
        rows = []
        for k, T in enumerate(seq):
            T = (T,) * body.dim if kind == "homothetic" else T
            res = steinhaus.identity_check(alpha, body, T, rel)
            rows.append([k, body.dim, type(body).__name__, tuple(T), res.n_points, res.G,
                         res.n_candidates, res.mismatches, res.det_ok])
    else:
        trials = int(cfg.params.get("trials", 200))
        _rng(cfg)
        d_choices = list(cfg.params.get("d", [2, 3]))
        rows = _pmap(_identity_trial, [(int(cfg.seed), k, d_choices) for k in range(trials)], jobs)
    t = Table(cols, rows)
    bad = sum(r[7] for r in rows) + sum(1 for r in rows if not r[8])
    t.extra = {"mismatches": sum(r[7] for r in rows)}
    if bad:
        raise CheckFailed(t.render(cfg.format) + f"{bad} identity failures\n")
    return t


def cmd_construct_meps(cfg: RunConfig, jobs: int) -> Table:
    body = parse_body(cfg.body or {"shape": "ball", "center": [0, 0], "radius": 1})
    eps = _rational(cfg.params.get("eps", "1/10"))
    try:
        M, ctx = latticecore.proposition_basis(body, eps)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    m_max = min(int(cfg.params.get("m_max", ctx.m_max)), ctx.m_max)
    ts = [ctx.t_m(m) for m in range(1, m_max + 1)]
    res = latticecore.F_batch(M, body, ts, cfg.budget)
    t = Table(["m", "t_m", "F", "target", "match", "clearance", "clearance_margin"])
    fails = 0
    for m, tm, r in zip(range(1, m_max + 1), ts, res):
        target = eps * m
        match = abs(float(r.y) - float(target)) <= 1e-12 and (
            not isinstance(r.y, (Fraction, LinearForm)) or r.y == target)
        ok, margin = latticecore.boundary_clearance(M, body, tm, target + eps / 5)
        fails += (not match) + (not ok)
        t.rows.append([m, tuple(f"{float(v):.12g}" for v in tm), r.y, target, match, ok, margin])
    t.extra = {"det": str(M.det_certificate().value), "m_max": ctx.m_max}
    if fails:
        raise CheckFailed(t.render(cfg.format) + f"{fails} construction checks failed\n")
    return t


def cmd_littlewood(cfg: RunConfig, jobs: int) -> Table:
    alpha, _ = parse_alpha(cfg.alpha, cfg)
    Ns = cfg.params.get("N", [10**3, 10**4])
    bad_N = cfg.params.get("bad_N")
    t = Table(["N", "littlewood_min", "littlewood_n", "bad_min", "bad_m"])
    for N in (Ns if isinstance(Ns, list) else [Ns]):
        N = int(N)
        t.rows.append(diophantine.approx_stats(alpha, N, min(N, int(bad_N)) if bad_N else None).row())
    return t


def cmd_chevallier_fuzz(cfg: RunConfig, jobs: int) -> Table:
    _rng(cfg)
    rep = ratsum.chevallier_fuzz(int(cfg.params.get("trials", 500)), tuple(cfg.params.get("d", [2, 3])),
                                 int(cfg.params.get("N_max", 12)), int(cfg.seed))
    t = Table(["trial", "kind", "d", "N", "G", "bound", "ok"],
              [[x.trial, x.kind, x.d, x.N, x.G, x.bound, x.ok] for x in rep.trials])
    t.extra = {"violations": len(rep.violations)}
    if rep.violations:
        raise CheckFailed(t.render(cfg.format) + f"{len(rep.violations)} violations\n")
    return t


def cmd_sumset_verify(cfg: RunConfig, jobs: int) -> Table:
    t = Table(["trial", "q", "C", "D", "r", "inner_lo", "inner_hi", "outer_ok", "inner_ok"])
    if "q" in cfg.params:
        specs = [ratsum.SumsetSpec(cfg.params["q"], cfg.params["C"], cfg.params["D"])]
    else:
        n = int(cfg.params.get("trials", 300))
        specs = [ratsum.random_sumset_spec(_rng(cfg, k), int(cfg.params.get("k_max", 4)),
                                           int(cfg.params.get("q_max", 12))) for k in range(n)]
    bad = 0
    for k, s in enumerate(specs):
        r = ratsum.inclusion_check(s)
        bad += not (r.outer_ok and r.inner_ok)
        t.rows.append([k, s.q, s.C, s.D, s.r, *r.inner_window, r.outer_ok, r.inner_ok])
    if bad:
        raise CheckFailed(t.render(cfg.format) + f"{bad} inclusion failures\n")
    return t


def cmd_orbit_track(cfg: RunConfig, jobs: int) -> Table:
    alpha, _ = parse_alpha(cfg.alpha, cfg)
    s_values = cfg.params.get("s", [i / 2 for i in range(25)])
    pts = diophantine.orbit_track(alpha, [float(s) for s in s_values])
    t = Table(["s", "sv", "sv_dual"], [p.row() for p in pts])
    t.extra = {"min_sv": min(p.sv for p in pts), "min_sv_dual": min(p.sv_dual for p in pts)}
    return t


COMMANDS: dict[str, Callable[[RunConfig, int], Table]] = {
    "steinhaus-scan": cmd_steinhaus_scan,
    "slater-scan": cmd_slater_scan,
    "identity-check": cmd_identity_check,
    "construct-meps": cmd_construct_meps,
    "littlewood": cmd_littlewood,
    "chevallier-fuzz": cmd_chevallier_fuzz,
    "sumset-verify": cmd_sumset_verify,
    "orbit-track": cmd_orbit_track,
}


# ---------------------------------------------------------------- fixtures and main

def check_fixture(directory: str, cfg: RunConfig, text: str) -> bool:
    """First run stores the output; later runs must reproduce it byte for byte."""
    path = Path(directory) / f"{cfg.command}-{cfg.digest()}.{cfg.format}"
    if not path.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        return True
    return path.read_text() == text


def load_config(args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config: {e}") from e
    known = set(RunConfig.__dataclass_fields__)
    params = dict(raw.pop("params", {}))
    params.update({k: raw.pop(k) for k in list(raw) if k not in known})
    raw["command"] = args.command
    raw["params"] = params
    for flag in ("seed", "budget", "precision_bits", "format", "output"):
        v = getattr(args, flag)
        if v is not None:
            raw[flag] = v
    try:
        return RunConfig(**raw)
    except TypeError as e:
        raise ConfigError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latticegaps", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--precision-bits", dest="precision_bits", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--fixtures", help="directory of regression fixtures")
    p.add_argument("--output", help="write here instead of stdout")
    return p


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    status = EXIT_OK
    try:
        cfg = load_config(args)
        reals.set_default_bits(cfg.precision_bits)
        table = COMMANDS[cfg.command](cfg, max(1, args.jobs))
        if table.status == "partial":
            status = EXIT_BUDGET
        text = table.render(cfg.format)
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except geo.BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        stdout.write("# status: partial\n")
        return EXIT_BUDGET
    except CheckFailed as e:
        stdout.write(str(e))
        return EXIT_FAIL
    if args.fixtures and not check_fixture(args.fixtures, cfg, text):
        print("regression: output differs from the stored fixture", file=sys.stderr)
        status = EXIT_FAIL
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        stdout.write(text)
    return status


def main() -> None:
    sys.exit(run())
