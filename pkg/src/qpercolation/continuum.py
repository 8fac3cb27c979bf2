"""Continuum model of the square-lattice walk.

Each of the eight local edge configurations a state can meet contributes a
difference operator, written here as coefficients of
``(d_yy, d_xx, d_x, d_y, 1, d_yx)``.  Weighting them by their probabilities
gives the effective equation

    p d_yy - p^2 (2p - 1) cos(theta) d_xx
      + 2 p^2 (1 - p) [(1 - cos theta) d_x - d_y]
      + 2 (1 - cos theta)(1 + p - p^2) = 0,

whose plane-wave solutions yield the lateral dispersion ``omega_x(k_x)``
and the directed one ``omega_y = p k_y``.  Percolation probabilities are the
``2n``-th powers of the corresponding group velocities.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass
from math import cos, exp, log, sqrt

import numpy as np

__all__ = [
    "PdeCoefficients",
    "PANELS",
    "pde_coefficients",
    "panel_operators",
    "config_weights",
    "omega_x",
    "group_velocity_x",
    "omega_y",
    "zeta_x",
    "zeta_y",
    "analytic_pa",
    "zeta_curves",
    "K_MAX",
]

K_MAX = sqrt(2.0)
PANELS = "abcdefgh"


@dataclass(frozen=True)
class PdeCoefficients:
    """Coefficients of the effective equation (no mixed ``d_yx`` term survives)."""

    c_yy: float
    c_xx: float
    c_x: float
    c_y: float
    c_0: float

    def as_tuple(self):
        return astuple(self)


def pde_coefficients(p: float, theta: float) -> PdeCoefficients:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    g = 1.0 - cos(theta)
    return PdeCoefficients(
        c_yy=p,
        c_xx=-p * p * (2 * p - 1) * cos(theta),
        c_x=2 * p * p * (1 - p) * g,
        c_y=-2 * p * p * (1 - p),
        c_0=2 * g * (1 + p - p * p),
    )


def panel_operators(theta: float) -> dict[str, tuple]:
    """Per-configuration operator coefficients ``(yy, xx, x, y, 0, yx)``.

    Panels a-d carry the up edge (transport into the next row), e-h lack it.
    """
    c = cos(theta)
    g = 1.0 - c
    return {
        "a": (1.0, -c, 0.0, 0.0, 2 * g, 0.0),
        "b": (1.0, 0.0, g, -1.0, 3 * g, 1.0),
        "c": (1.0, 0.0, g, -1.0, 3 * g, -1.0),
        "d": (1.0, 0.0, 0.0, 0.0, 2 * g, 0.0),
        "e": (0.0, 0.0, -g, 0.0, 3 * g, 0.0),
        "f": (0.0, 0.0, g, 0.0, 3 * g, 0.0),
        "g": (0.0, c, 0.0, 0.0, 2 * g, 0.0),
        "h": (0.0, 0.0, 0.0, 0.0, 2 * g, 0.0),
    }


def config_weights(p: float) -> dict[str, float]:
    """Probabilities of the eight local configurations.

    ``{a, b, c, d}`` share a present up edge and sum to ``p``; ``{e, f, g, h}``
    share a missing one and sum to ``1 - p``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    q = 1.0 - p
    return {
        "a": p ** 3,
        "b": p * p * q,
        "c": p * p * q,
        "d": p * q * q,
        "e": p * q * q,
        "f": p * q * q,
        "g": p * p * q,
        "h": q ** 3,
    }


def _radicand(k_x, p, theta):
    if p <= 0.0:
        raise ZeroDivisionError("omega_x is undefined at p = 0")
    c = cos(theta)
    return p * (2 * p - 1) * c * k_x * k_x + 2 * (1 / p - p + 1) * (1 - c)


def omega_x(k_x: float, p: float, theta: float, sign: int = +1) -> float:
    """Lateral dispersion relation; ``sign=-1`` selects the negative branch."""
    if not 0.0 <= k_x <= K_MAX + 1e-15:
        raise ValueError(f"k_x must lie in [0, sqrt(2)], got {k_x}")
    rad = _radicand(k_x, p, theta)
    if rad < 0:
        raise ValueError(f"negative radicand {rad} at k_x={k_x}, p={p}, theta={theta}")
    return sign * sqrt(rad)


def group_velocity_x(k_x: float, p: float, theta: float) -> float:
    """``d omega_x / d k_x`` on the positive branch."""
    w = omega_x(k_x, p, theta)
    if w == 0.0:
        raise ZeroDivisionError("group velocity undefined where omega_x = 0")
    return p * (2 * p - 1) * cos(theta) * k_x / w


def zeta_x(p: float, n: int, theta: float, k_x: float = K_MAX) -> float:
    """Probability of crossing ``n`` columns laterally, ``v_g^(2n)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    v = abs(group_velocity_x(k_x, p, theta))
    if v == 0.0:
        return 0.0
    return exp(2 * n * log(v))


def omega_y(k_y: float, p: float) -> float:
    """Directed dispersion from the weighted transport equation (equals ``p k_y``)."""
    w = config_weights(p)
    moving = w["a"] + w["b"] + w["c"] + w["d"]
    total = 3 * p * (1 - p) ** 2 + 3 * p * p * (1 - p) + p ** 3 + (1 - p) ** 3
    return k_y * moving / total


def zeta_y(p: float, n: int) -> float:
    """``p^(2n)``, evaluated in log space."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    return exp(2 * n * log(p))


def analytic_pa(n: int, threshold: float = 0.01) -> float:
    """Solve ``p^(2n) = threshold`` for ``p``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must lie in (0, 1]")
    return exp(log(threshold) / (2 * n))


def zeta_curves(p_grid, n: int, theta: float, k_x: float = K_MAX):
    """``(zeta_y, zeta_x)`` arrays over ``p_grid`` (``zeta_x`` is nan at p = 0)."""
    zy = np.array([zeta_y(p, n) for p in p_grid])
    zx = np.array([zeta_x(p, n, theta, k_x) if p > 0 else np.nan for p in p_grid])
    return zy, zx
