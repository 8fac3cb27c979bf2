"""Transition point on square, honeycomb and nanotube lattices.

The honeycomb lattice has fewer bonds per vertex than the square lattice and
its transition point sits lower.  Rolling the honeycomb into a tube changes
p_a very little.

    python3 demos/geometry_comparison.py --trials 200
"""

import argparse

from qpercolation import CoinParams, RandomTheta, build_spec, find_pa

CASES = [("square", 50, 50), ("honeycomb", 50, 50), ("nanotube", 25, 50), ("nanotube", 50, 50)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    coins = CoinParams(RandomTheta(args.seed))
    for geometry, nx, ny in CASES:
        pa = find_pa(build_spec(geometry, nx, ny), coins, trials=args.trials, master_seed=args.seed)
        print(f"{geometry:9s} {nx:3d}x{ny:<3d}  p_a = {pa:.4f}")


if __name__ == "__main__":
    main()
