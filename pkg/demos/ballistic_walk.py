"""Walk on a fully connected square lattice.

Prints the exit curve P(t) of the r = 1 walk, then the support cone and the
mirror symmetries of the distribution for the chosen r.

    python3 demos/ballistic_walk.py --size 100
"""

import argparse
from math import pi

import numpy as np

from qpercolation import CoinParams, FixedTheta, InitialState, build_spec, exit_probability
from qpercolation import init_state, sample_edges, step
from qpercolation.walk import DOWN, SYMMETRIC, UP


def run(spec, cfg, coins, init, steps):
    s = init_state(spec, init)
    curve = []
    for _ in range(steps):
        s = step(s, cfg, coins)
        curve.append(exit_probability(s))
    return s, np.array(curve)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=100)
    ap.add_argument("--r", type=int, choices=(1, 2), default=2)
    args = ap.parse_args()
    n = args.size
    spec = build_spec("square", n, n)
    cfg = sample_edges(spec, 1.0, 0)
    coins = CoinParams(FixedTheta(pi / 4), args.r)

    # with r = 1 every component climbs one row per step, so all mass has left at t = n
    _, curve = run(spec, cfg, CoinParams(FixedTheta(pi / 4), 1), SYMMETRIC, 2 * n)
    print(f"exit curve on {n}x{n}, r=1:")
    for t in (n // 4, n // 2, 3 * n // 4, n - 1, n, n + 1, 2 * n):
        print(f"  P({t:4d}) = {curve[t - 1]:.12f}")

    t = n // 2
    probs = {name: run(spec, cfg, coins, init, t)[0].probability()
             for name, init in (("up", UP), ("down", DOWN), ("real", InitialState(pi / 2, 0.0)),
                                ("complex", SYMMETRIC))}
    x0 = spec.origin.x
    live = np.argwhere(probs["up"] > 0)
    print(f"r={args.r}, support after t={t}: x in [{live[:, 0].min() - x0}, {live[:, 0].max() - x0}], "
          f"y in [0, {live[:, 1].max()}]")
    ymirror = np.abs(probs["up"][:, : t + 1] - probs["down"][:, t::-1]).max()
    print(f"|up> vs |down> mirrored about y = t/2: max diff {ymirror:.1e}")
    d = np.arange(1, t)
    for name in ("real", "complex"):
        asym = np.abs(probs[name][x0 + d] - probs[name][x0 - d]).max()
        print(f"x-mirror asymmetry of the {name} superposition: {asym:.1e}")


if __name__ == "__main__":
    main()
