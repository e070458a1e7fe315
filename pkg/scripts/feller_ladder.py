"""Sweep the killing-weight approximation in alpha for a few gap widths.

For each gap width d the weight assigned to the gap by the resolvent
construction converges, as alpha grows, to the closed-form value 1/(2d).
The sweep writes one row per (d, alpha) pair so the convergence can be
plotted directly, and prints a small table of terminal relative errors.

Usage:
    python3 scripts/feller_ladder.py --widths 0.25 0.5 1.0 --decades 5
"""

import argparse
import csv
import sys
from pathlib import Path

import traceform as tf


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--widths", type=float, nargs="+", default=[0.25, 0.5, 1.0],
                    help="gap widths d to sweep")
    ap.add_argument("--decades", type=int, default=5,
                    help="alpha runs over 10^1 .. 10^decades")
    ap.add_argument("--out", type=Path, default=Path("feller_ladder.csv"))
    args = ap.parse_args(argv)

    alphas = [10.0 ** k for k in range(1, args.decades + 1)]
    rows = []
    for d in args.widths:
        limit = tf.feller_weight(d)
        for alpha in alphas:
            rows.append((d, alpha, tf.feller_numeric(d, alpha), limit))

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d", "alpha", "numeric", "limit"])
        w.writerows(rows)

    print(f"wrote {len(rows)} rows to {args.out}")
    print(f"{'d':>6} {'limit':>10} {'rel err at alpha=1e' + str(args.decades):>24}")
    for d in args.widths:
        limit = tf.feller_weight(d)
        last = next(r[2] for r in rows if r[0] == d and r[1] == alphas[-1])
        print(f"{d:6.3f} {limit:10.6f} {abs(last - limit) / limit:24.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
