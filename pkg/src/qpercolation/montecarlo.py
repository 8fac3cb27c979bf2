"""Disorder averages of the percolation probability and transition points.

Realization ``i`` of a run uses edge seed ``derive(master_seed, i)``, and
the same realization seeds are reused at every ``p`` of a sweep, so a curve
is built from coupled realizations (an edge present at ``p`` stays present
at every larger ``p``).  Trials are processed in fixed blocks of
``BLOCK`` realizations; workers only change which process runs a block, so
results are bit-identical for any ``jobs``.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _rng, __version__
from .coin import CoinParams, FixedTheta, RandomTheta, theta_field
from .lattice import LatticeSpec, edge_uniforms, flags_from_uniforms, move_masks
from .observables import fmt
from .walk import SYMMETRIC, EvolvePolicy, InitialState, evolve_batch

__all__ = [
    "SweepResult",
    "realization_seeds",
    "average_zeta",
    "sweep",
    "find_pa",
    "estimate_pa",
    "default_grid",
    "BLOCK",
]

log = logging.getLogger(__name__)

BLOCK = 50
RERUN_FACTOR = 4


def default_grid(start=0.80, stop=1.00, step=0.005) -> np.ndarray:
    n = int(round((stop - start) / step))
    return np.round(start + step * np.arange(n + 1), 12)


def realization_seeds(master_seed: int, coins: CoinParams, index: int):
    """``(edge_seed, coin_seed)`` of realization ``index``."""
    edge = int(_rng.hash64(master_seed, _rng.REALIZATION, np.array([index]))[0])
    coin_key = coins.theta.seed if isinstance(coins.theta, RandomTheta) else 0
    coin = int(_rng.hash64(master_seed, _rng.COIN_REALIZATION, coin_key,
                           np.array([index]))[0])
    return edge, coin


@dataclass
class SweepResult:
    spec: LatticeSpec
    coins: CoinParams
    init: InitialState
    p_grid: np.ndarray
    mean_zeta: np.ndarray
    stderr_zeta: np.ndarray
    trials: int
    master_seed: int
    threshold: float = 0.01
    p_a: float | None = None
    policy: EvolvePolicy = EvolvePolicy()
    composite_draws: int = 1
    provenance: dict = field(default_factory=dict)

    def to_csv(self, header=()) -> str:
        lines = [f"# {h}" for h in header]
        lines.append("p,mean_zeta,stderr,trials")
        for p, m, s in zip(self.p_grid, self.mean_zeta, self.stderr_zeta):
            lines.append(f"{fmt(p)},{fmt(m)},{fmt(s)},{self.trials}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        init = {"delta": self.init.delta, "eta": self.init.eta}
        if self.init.origin is not None:
            init["origin"] = [self.init.origin.x, self.init.origin.y]
        return {
            "coins": self.coins.to_dict(),
            "composite_draws": self.composite_draws,
            "init": init,
            "master_seed": self.master_seed,
            "mean_zeta": [float(v) for v in self.mean_zeta],
            "p_a": self.p_a,
            "p_grid": [float(v) for v in self.p_grid],
            "policy": {"eps_stat": self.policy.eps_stat,
                       "max_steps": self.policy.resolve(self.spec).max_steps},
            "provenance": self.provenance,
            "spec": self.spec.to_dict(),
            "stderr_zeta": [float(v) for v in self.stderr_zeta],
            "threshold": self.threshold,
            "trials": self.trials,
            "version": __version__,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _block_theta(spec, coins, coin_seeds):
    if isinstance(coins.theta, FixedTheta):
        return theta_field(spec, coins)
    return np.stack([theta_field(spec, RandomTheta(s)) for s in coin_seeds])


def _run_block(task):
    """Evaluate one block of realizations at every grid point.

    Returns ``(zeta[n_p, b], reruns, nonconverged)``.
    """
    spec, coins, init, p_grid, policy, master_seed, start, stop, draws = task
    idx = range(start, stop)
    seeds = [realization_seeds(master_seed, coins, i) for i in idx]
    uniforms = [edge_uniforms(spec, e, draws) for e, _ in seeds]
    stacked = {k: np.stack([u[k] for u in uniforms]) for k in uniforms[0]}
    theta = _block_theta(spec, coins, [c for _, c in seeds])
    policy = policy.resolve(spec)
    out = np.empty((len(p_grid), len(idx)))
    reruns = nonconv = 0
    for j, p in enumerate(p_grid):
        moves = move_masks(spec, flags_from_uniforms(spec, stacked, p))
        res = evolve_batch(spec, moves, theta, coins, init, policy)
        z = res["zeta"]
        bad = np.flatnonzero(~res["converged"])
        if bad.size:
            reruns += bad.size
            big = replace(policy, max_steps=RERUN_FACTOR * policy.max_steps)
            sub = tuple(m[bad] for m in moves)
            th = theta[bad] if theta.ndim == 3 else theta
            again = evolve_batch(spec, sub, th, coins, init, big)
            z = z.copy()
            z[bad] = again["zeta"]
            nonconv += int((~again["converged"]).sum())
        out[j] = z
    return out, reruns, nonconv


def _collect(spec, coins, init, p_grid, trials, master_seed, policy, jobs, draws):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tasks = [
        (spec, coins, init, tuple(p_grid), policy, master_seed, s,
         min(s + BLOCK, trials), draws)
        for s in range(0, trials, BLOCK)
    ]
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_run_block, tasks))
    else:
        parts = [_run_block(t) for t in tasks]
    zeta = np.concatenate([p[0] for p in parts], axis=1)
    reruns = sum(p[1] for p in parts)
    nonconv = sum(p[2] for p in parts)
    if nonconv:
        log.warning("%d realizations did not converge after re-run", nonconv)
    return zeta, reruns, nonconv


def _mean_stderr(z):
    mean = z.mean(axis=-1)
    n = z.shape[-1]
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, z.std(axis=-1, ddof=1) / np.sqrt(n)


def average_zeta(spec: LatticeSpec, p: float, coins: CoinParams = CoinParams(),
                 init: InitialState = SYMMETRIC, trials: int = 200,
                 master_seed: int = 0, policy: EvolvePolicy = EvolvePolicy(),
                 jobs: int = 1, composite_draws: int = 1):
    """Mean and standard error of ``zeta`` over ``trials`` realizations."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    z, _, _ = _collect(spec, coins, init, [p], trials, master_seed, policy, jobs,
                       composite_draws)
    mean, err = _mean_stderr(z[0])
    return float(mean), float(err)


def estimate_pa(p_grid, mean_zeta, threshold: float = 0.01):
    """First crossing of ``threshold``, linearly interpolated.

    Returns ``None`` if the curve never reaches the threshold.  If the first
    grid point is already above it, that point is returned.
    """
    p_grid = np.asarray(p_grid, float)
    mean_zeta = np.asarray(mean_zeta, float)
    hits = np.flatnonzero(mean_zeta >= threshold)
    if hits.size == 0:
        return None
    i = int(hits[0])
    if i == 0:
        return float(p_grid[0])
    p0, p1 = p_grid[i - 1], p_grid[i]
    z0, z1 = mean_zeta[i - 1], mean_zeta[i]
    return float(p0 + (threshold - z0) * (p1 - p0) / (z1 - z0))


def sweep(spec: LatticeSpec, coins: CoinParams = CoinParams(),
          init: InitialState = SYMMETRIC, p_grid=None, trials: int = 200,
          master_seed: int = 0, policy: EvolvePolicy = EvolvePolicy(),
          threshold: float = 0.01, jobs: int = 1, composite_draws: int = 1):
    """``average_zeta`` over an ascending grid of ``p`` (default 0.80..1.00)."""
    p_grid = default_grid() if p_grid is None else np.asarray(p_grid, float)
    if p_grid.size == 0:
        raise ValueError("empty p grid")
    if np.any(np.diff(p_grid) <= 0) or p_grid[0] < 0 or p_grid[-1] > 1:
        raise ValueError("p grid must be strictly ascending inside [0, 1]")
    z, reruns, nonconv = _collect(spec, coins, init, p_grid, trials, master_seed,
                                  policy, jobs, composite_draws)
    mean, err = _mean_stderr(z)
    return SweepResult(
        spec=spec, coins=coins, init=init, p_grid=p_grid, mean_zeta=mean,
        stderr_zeta=err, trials=trials, master_seed=master_seed,
        threshold=threshold, p_a=estimate_pa(p_grid, mean, threshold),
        policy=policy, composite_draws=composite_draws,
        provenance={"block": BLOCK, "reruns": reruns, "nonconverged": nonconv},
    )


def find_pa(spec: LatticeSpec, coins: CoinParams = CoinParams(),
            init: InitialState = SYMMETRIC, threshold: float = 0.01,
            trials: int = 200, master_seed: int = 0, resolution: float = 0.005,
            p_min: float = 0.80, p_max: float = 1.00,
            policy: EvolvePolicy = EvolvePolicy(), jobs: int = 1,
            composite_draws: int = 1) -> float:
    """Transition point: where the mean ``zeta`` first reaches ``threshold``."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie strictly between 0 and 1")
    res = sweep(spec, coins, init, default_grid(p_min, p_max, resolution), trials,
                master_seed, policy, threshold, jobs, composite_draws)
    if res.p_a is None:
        raise RuntimeError(
            f"threshold {threshold} not reached on [{p_min}, {p_max}]"
        )
    return res.p_a
