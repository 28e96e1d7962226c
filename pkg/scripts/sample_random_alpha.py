"""Max gap count over R = 1..R_max on the unit square for seeded random alpha.

Seed s uses the coordinates RandomGen(1000 + 2s) and RandomGen(1001 + 2s),
the same scheme as the acceptance test.  Prints one line per seed and the
number of seeds whose maximum reaches the threshold.
"""
from __future__ import annotations

import argparse
import time

from latticegaps import geometry as geo
from latticegaps import steinhaus
from latticegaps.reals import LinearForm, RandomGen


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--first", type=int, default=0)
    ap.add_argument("--R-max", dest="R_max", type=int, default=400)
    ap.add_argument("--threshold", type=int, default=10)
    args = ap.parse_args()
    body = geo.unit_box(2)
    hits = 0
    for s in range(args.first, args.first + args.seeds):
        t = time.time()
        alpha = [LinearForm.generator(RandomGen(1000 + 2 * s)), LinearForm.generator(RandomGen(1001 + 2 * s))]
        recs = steinhaus.scan_homothetic(alpha, body, range(1, args.R_max + 1))
        g = steinhaus.max_G(recs)
        arg = next(r.params[0] for r in recs if r.G == g)
        hits += g >= args.threshold
        print(f"seed {s:3d}  alpha ~ ({float(alpha[0]):.6f}, {float(alpha[1]):.6f})  "
              f"max G {g:3d} at R = {arg}  ({time.time() - t:.1f}s)", flush=True)
    print(f"{hits}/{args.seeds} seeds reach max G >= {args.threshold}")


if __name__ == "__main__":
    main()
