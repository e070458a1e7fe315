"""Long-run atom occupation of the darned walk versus the chain's stationary law.

Collapses each removed interval of a Cantor-type complement to a point,
pushes Lebesgue measure through the map (each atom carries the collapsed
length), and runs the speed-driven walk on the image.  The time fraction
spent on each atom is compared against two references: the collapsed
length itself (the exact long-run answer) and the stationary law of the
discrete chain (the h-dependent target the walk actually converges to).

Usage:
    python3 scripts/darning_occupation.py --depth 1 --grid 3/1280 --horizon 1000
"""

import argparse
import csv
import sys
from fractions import Fraction as Fr
from pathlib import Path

import numpy as np

import traceform as tf
from traceform.simulate import build_chain, walk_occupation


def chain_stationary(chain):
    """Stationary law of the reflecting walk, from global balance of the
    continuous-time chain with the walk's holding means."""
    holds = np.asarray(chain.holds, dtype=float)
    k = holds.size
    P = np.zeros((k, k))
    P[0, 1] = 1.0
    P[k - 1, k - 2] = 1.0
    for i in range(1, k - 1):
        P[i, i - 1] = 0.5
        P[i, i + 1] = 0.5
    Q = P / holds[:, None]
    Q[np.diag_indices(k)] = -1.0 / holds
    A = np.vstack([Q.T, np.ones(k)])
    b = np.zeros(k + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    return pi


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=1)
    ap.add_argument("--grid", type=Fr, default=Fr(3, 1280), help="node spacing h")
    ap.add_argument("--horizon", type=float, default=1000.0)
    ap.add_argument("--burn-in", type=float, default=100.0)
    ap.add_argument("--x0", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=424242)
    ap.add_argument("--out", type=Path, default=Path("darning_occupation.csv"))
    args = ap.parse_args(argv)

    iset = tf.svc_complement(args.depth)
    dm = tf.DarningMap(iset, z=iset.window[0])
    speed = tf.pushforward_speed(dm, "lebesgue")
    atoms = sorted(p for p, m in speed.atoms)
    h = float(args.grid)

    chain = build_chain(speed, h)
    pi = chain_stationary(chain)
    oracle = {float(chain.nodes[k]): float(pi[k]) for k in chain.atom_nodes}

    results = walk_occupation(speed, h, args.x0, args.horizon, seed=args.seed,
                              targets=[float(p) for p in atoms], burn_in=args.burn_in)

    mass = dict(speed.atoms)
    rows = []
    print(f"{'atom':>10} {'mass':>8} {'occupied':>10} {'stderr':>8} {'chain':>8}")
    for pos, res in zip(atoms, results):
        key = min(oracle, key=lambda y: abs(y - float(pos)))
        rows.append((float(pos), float(mass[pos]), res.estimate, res.stderr, oracle[key]))
        print(f"{float(pos):10.5f} {float(mass[pos]):8.5f} {res.estimate:10.5f} "
              f"{res.stderr:8.5f} {oracle[key]:8.5f}")
        if res.warning:
            print(f"           warning: {res.warning}")

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["atom", "mass", "occupied", "stderr", "chain_stationary"])
        w.writerows(rows)
    print(f"wrote {len(rows)} atoms to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
