"""Continuum estimate of the transmission against Monte Carlo.

The continuum model gives zeta_y = p^(2n) along the transport direction and
a strongly damped lateral mode, so p_a = 0.01^(1/2n).

    python3 demos/analytic_vs_montecarlo.py --size 50 --trials 200
"""

import argparse
from math import pi

from qpercolation import CoinParams, FixedTheta, build_spec, continuum, sweep
from qpercolation.montecarlo import default_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=50)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    n = args.size
    grid = default_grid(0.90, 1.00, 0.01)
    res = sweep(build_spec("square", n, n), CoinParams(FixedTheta(pi / 4)), p_grid=grid,
                trials=args.trials, master_seed=args.seed)
    zy, zx = continuum.zeta_curves(grid, n, pi / 4)
    print(f"square {n}x{n}")
    print("     p   monte carlo    zeta_y      zeta_x")
    for p, z, a, b in zip(grid, res.mean_zeta, zy, zx):
        print(f"  {p:.2f}   {z:.3e}   {a:.3e}   {b:.3e}")
    print(f"p_a: monte carlo {res.p_a:.4f}, continuum {continuum.analytic_pa(n):.4f}")


if __name__ == "__main__":
    main()
