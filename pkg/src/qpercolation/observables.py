"""Exit probability, per-realization percolation probability and exports."""

from __future__ import annotations

import csv
import io
from dataclasses import astuple, dataclass, fields

import numpy as np

from .coin import CoinParams, RandomTheta, theta_field
from .lattice import EdgeConfig, LatticeSpec, sample_edges
from .walk import (
    CONVERGED,
    SYMMETRIC,
    EvolvePolicy,
    InitialState,
    WalkState,
    evolve,
    init_state,
)

__all__ = [
    "ZetaSample",
    "exit_probability",
    "zeta_single",
    "trapped_mass_map",
    "distribution_csv",
    "zeta_samples_csv",
    "fmt",
]


def fmt(v) -> str:
    """Fixed 17-significant-digit rendering used by every CSV writer."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


@dataclass(frozen=True)
class ZetaSample:
    p: float
    seed: int
    zeta: float
    trapped: float
    steps_run: int
    converged: bool


def exit_probability(state: WalkState):
    """Probability of finding the walker outside the ``n_x x n_y`` window.

    Computed as boundary-absorbed mass plus whatever sits in padding columns,
    which equals one minus the window occupation.
    """
    spec = state.spec
    out = np.asarray(state.exited, float)
    if spec.pad:
        prob = state.probability()
        win = spec.window
        out = out + prob[..., : win.start, :].sum(axis=(-2, -1))
        out = out + prob[..., win.stop:, :].sum(axis=(-2, -1))
    return float(out) if out.ndim == 0 else out


def zeta_single(spec: LatticeSpec, p: float, coins: CoinParams = CoinParams(),
                init: InitialState = SYMMETRIC, seeds: tuple[int, int] = (0, 0),
                policy: EvolvePolicy = EvolvePolicy(), composite_draws: int = 1):
    """Evolve one realization to termination and read off ``zeta``.

    ``seeds`` is ``(edge_seed, coin_seed)``; the coin seed is only used with
    a random angle field and then replaces the seed stored in ``coins``.
    """
    edge_seed, coin_seed = seeds
    config = sample_edges(spec, p, edge_seed, composite_draws)
    if isinstance(coins.theta, RandomTheta):
        coins = CoinParams(RandomTheta(coin_seed), coins.r)
    state, reason = evolve(init_state(spec, init), config, coins, policy,
                           theta=theta_field(spec, coins))
    return ZetaSample(
        p=float(p),
        seed=int(edge_seed),
        zeta=exit_probability(state),
        trapped=float(state.trapped[..., spec.window, :].sum()),
        steps_run=state.t,
        converged=reason == CONVERGED,
    )


def trapped_mass_map(state: WalkState, config: EdgeConfig) -> np.ndarray:
    """Per-vertex probability held on trapping self-loops.

    Non-zero only where a move out of the vertex is missing.
    """
    if config.spec != state.spec:
        raise ValueError("edge configuration belongs to a different lattice")
    return state.trapped.copy()


def distribution_csv(state: WalkState, header: list[str] = ()) -> str:
    """``x,y,prob`` rows in origin-centred coordinates, row-major in y."""
    spec = state.spec
    prob = state.probability()
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    buf.write("x,y,prob\n")
    px = spec.centred_x(np.arange(spec.width))
    for y in range(spec.n_y):
        for i in range(spec.width):
            buf.write(f"{int(px[i])},{y},{fmt(prob[i, y])}\n")
    return buf.getvalue()


def zeta_samples_csv(samples, header: list[str] = ()) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f.name for f in fields(ZetaSample)])
    for s in samples:
        w.writerow([fmt(v) for v in astuple(s)])
    return buf.getvalue()
