"""Coin operators and the per-vertex coin-angle field."""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from . import _rng
from .lattice import LatticeSpec

__all__ = [
    "FixedTheta",
    "RandomTheta",
    "CoinParams",
    "coin_theta",
    "coin_y",
    "theta_field",
]


@dataclass(frozen=True)
class FixedTheta:
    theta: float = pi / 4

    def __post_init__(self):
        if not 0.0 <= self.theta <= pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")


@dataclass(frozen=True)
class RandomTheta:
    """I.i.d. uniform angles on ``[0, pi]``, one per vertex."""

    seed: int = 0


@dataclass(frozen=True)
class CoinParams:
    """Coin-angle policy and the directed-coin parameter ``r``.

    ``r = 1`` moves the whole spinor along the directed edge; ``r >= 2``
    applies :func:`coin_y` and keeps one component on a self-loop.
    """

    theta: FixedTheta | RandomTheta = FixedTheta()
    r: int = 1

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise ValueError(f"r must be a positive integer, got {self.r}")

    def to_dict(self) -> dict:
        if isinstance(self.theta, FixedTheta):
            th = {"policy": "fixed", "theta": self.theta.theta}
        else:
            th = {"policy": "random", "seed": self.theta.seed}
        return {"theta": th, "r": self.r}


def coin_theta(theta: float) -> np.ndarray:
    """Lateral coin ``[[cos t, -i sin t], [-i sin t, cos t]]``."""
    if not 0.0 <= theta <= pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def coin_y(r: int) -> np.ndarray:
    """Directed coin ``[[a, b], [b, -a]]`` with ``a = 1/sqrt(r)``.

    ``b = sqrt((r - 1) / r)``.  Real, symmetric and an involution.
    """
    if int(r) != r or r < 2:
        raise ValueError(f"coin_y needs an integer r >= 2, got {r}")
    a = 1.0 / np.sqrt(r)
    b = np.sqrt((r - 1) / r)
    return np.array([[a, b], [b, -a]], dtype=np.complex128)


def theta_field(spec: LatticeSpec, params: CoinParams | FixedTheta | RandomTheta):
    """Per-vertex coin angles of shape ``spec.shape``."""
    policy = params.theta if isinstance(params, CoinParams) else params
    if isinstance(policy, FixedTheta):
        return np.full(spec.shape, float(policy.theta))
    xs = spec.centred_x(np.arange(spec.width))[:, None]
    ys = np.arange(spec.n_y)[None, :]
    return pi * _rng.uniform(policy.seed, _rng.THETA, xs, ys)
