"""Monte Carlo sweep of the mean transmission across the quantum transition.

    python3 demos/transition_sweep.py --geometry square --size 50 --trials 200
"""

import argparse
from math import pi

from qpercolation import CoinParams, FixedTheta, RandomTheta, build_spec, sweep
from qpercolation.montecarlo import default_grid
from qpercolation.walk import SYMMETRIC


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--geometry", default="square", choices=("square", "honeycomb", "nanotube"))
    ap.add_argument("--size", type=int, default=50)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--theta-random", action="store_true")
    args = ap.parse_args()

    spec = build_spec(args.geometry, args.size, args.size)
    theta = RandomTheta(args.seed) if args.theta_random else FixedTheta(pi / 4)
    res = sweep(spec, CoinParams(theta), SYMMETRIC, default_grid(0.80, 1.00, 0.01),
                args.trials, args.seed, jobs=args.jobs)
    print(f"{args.geometry} {args.size}x{args.size}, {args.trials} trials per point")
    for p, z, e in zip(res.p_grid, res.mean_zeta, res.stderr_zeta):
        bar = "#" * int(round(60 * z))
        print(f"  p={p:.2f}  zeta={z:.5f} +- {e:.5f}  {bar}")
    print(f"p_a (mean zeta crosses 0.01) = {res.p_a:.4f}")


if __name__ == "__main__":
    main()
