"""Randomized exit-probability battery against the linear closed form.

Draws gaps (a, b) with sixteenth-of-a-unit endpoints and interior starting
points, estimates the probability of leaving through the left endpoint by
simulation, and compares against (b - x0) / (b - a).  Writes one row per
case with the z-score of the estimate and prints how many cases fall
outside three standard errors.

Usage:
    python3 scripts/hitting_battery.py --cases 100 --paths 100000 --seed 905
"""

import argparse
import csv
import math
import sys
from fractions import Fraction as Fr
from pathlib import Path

import numpy as np

import traceform as tf
from traceform.simulate import estimate_hitting


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=100)
    ap.add_argument("--paths", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=905)
    ap.add_argument("--dt-fraction", type=int, default=40,
                    help="time step is (gap / dt-fraction)^2")
    ap.add_argument("--no-correct", action="store_true",
                    help="disable the overshoot boundary correction")
    ap.add_argument("--out", type=Path, default=Path("hitting_battery.csv"))
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    rows = []
    outside = 0
    for i in range(args.cases):
        a = Fr(int(rng.integers(-16, 16)), 16)
        b = a + Fr(int(rng.integers(4, 33)), 16)
        lam = float(rng.uniform(0.1, 0.9))
        x0 = float(a) + lam * float(b - a)
        gap = tf.build_interval_set([(a, b)], (a, b))
        dt = (float(b - a) / args.dt_fraction) ** 2
        left, _ = estimate_hitting(gap, x0, args.paths, seed=args.seed + 1 + i,
                                   dt=dt, correct=not args.no_correct)
        p = (float(b) - x0) / float(b - a)
        sigma = math.sqrt(p * (1 - p) / args.paths)
        z = (left.estimate - p) / sigma
        outside += abs(z) > 3.0
        rows.append((float(a), float(b), x0, left.estimate, left.stderr, p, z))

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "b", "x0", "estimate", "stderr", "truth", "z"])
        w.writerows(rows)

    worst = max(abs(r[-1]) for r in rows)
    print(f"wrote {len(rows)} cases to {args.out}")
    print(f"outside 3 sigma: {outside}/{args.cases} (worst |z| = {worst:.2f})")
    return 0 if outside <= max(1, args.cases // 100) else 1


if __name__ == "__main__":
    sys.exit(main())
