"""Recompute the frozen regression constants and write them to the package data file.

Run once on a clean checkout; the acceptance suite then asserts against
the stored values.  Re-running must reproduce the file unchanged.
"""
from __future__ import annotations

import argparse
import json
import math
import time
from fractions import Fraction
from pathlib import Path

from latticegaps import diophantine, geometry as geo, ratsum, steinhaus
from latticegaps.circleset import RationalBeta
from latticegaps.reals import sqrt_form

OUT = Path(__file__).resolve().parents[1] / "src" / "latticegaps" / "data" / "regression.json"


def floor_digits(x: float, digits: int = 6) -> str:
    """x rounded down to `digits` significant digits, as a decimal string."""
    e = math.floor(math.log10(x)) - digits + 1
    q = Fraction(10) ** e
    return str(float(math.floor(Fraction(x) / q) * q))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(OUT))
    args = ap.parse_args()
    cubic = diophantine.cubic_pair()
    data = {}

    t = time.time()
    recs = steinhaus.scan_homothetic(cubic, geo.unit_box(2), range(1, 401))
    data["cubic_square_max_G"] = {"R_max": 400, "value": steinhaus.max_G(recs)}
    print(f"cubic scan: max G {data['cubic_square_max_G']['value']} ({time.time() - t:.1f}s)")

    v, m = diophantine.bad_approx_min(cubic, 500)
    data["cubic_bad_approx"] = {"N": 500, "observed": f"{float(v):.15g}", "witness": list(m),
                                "floor": floor_digits(float(v))}
    print(f"bad approx: {float(v):.12g} at {m}")

    s_values = [i / 4 for i in range(49)]
    orbit = diophantine.orbit_track(cubic, s_values)
    data["cubic_orbit"] = {"s_max": 12, "s_step": 0.25,
                           "sv_floor": floor_digits(min(p.sv for p in orbit), 3),
                           "sv_dual_floor": floor_digits(min(p.sv_dual for p in orbit), 3)}
    print(f"orbit floors: {data['cubic_orbit']}")

    lw, n = diophantine.littlewood_min((sqrt_form(2), sqrt_form(3)), 10**4)
    data["littlewood_sqrt2_sqrt3"] = {"N": 10**4, "value": f"{lw:.15g}", "n": n}

    rel = RationalBeta.from_affine((Fraction(1, 3), Fraction(1, 5)), (Fraction(1, 2), 0), sqrt_form(2))
    t = time.time()
    scan = ratsum.bounded_gap_scan(rel, 60)
    data["rational_beta_max_G"] = {"T_max": 60, "value": scan.max_G, "argmax": list(scan.argmax),
                                   "bound": scan.bound}
    print(f"rational beta scan: max G {scan.max_G} <= {scan.bound} ({time.time() - t:.1f}s)")

    Path(args.out).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
