"""Lattice geometries and seeded bond-percolation realizations.

Three geometries are supported:

* ``square``    -- every vertex has a left/right lateral edge and an up edge.
* ``honeycomb`` -- brick-wall embedding; every vertex has two composite
  diagonal moves ``(x, y) -> (x -+ 1, y + 1)`` and one up edge.
* ``nanotube``  -- honeycomb with periodic columns.

Arrays are indexed ``[x, y]`` with shape ``(width, n_y)`` where
``width = n_x + 2 * pad``.  Missing edges only occur inside the central
``n_x x n_y`` window; padding columns and edges that leave the simulated
region are always present.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _rng

__all__ = [
    "Geometry",
    "Boundary",
    "LatticeSpec",
    "Vertex",
    "EdgeConfig",
    "build_spec",
    "sample_edges",
    "edge_uniforms",
    "flags_from_uniforms",
    "move_masks",
    "is_trapping_vertex",
    "trapping_mask",
]


class Geometry(str, Enum):
    SQUARE = "square"
    HONEYCOMB = "honeycomb"
    NANOTUBE = "nanotube"


class Boundary(str, Enum):
    ABSORBING = "absorbing"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class Vertex:
    x: int
    y: int


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry and extent of the simulated region.

    ``closed=True`` makes both axes periodic for any geometry.  It exists for
    the dense-matrix unitarity check and is not a physical configuration.
    """

    geometry: Geometry
    n_x: int
    n_y: int
    x_boundary: Boundary
    y_boundary: Boundary = Boundary.ABSORBING
    pad: int = 0

    def __post_init__(self):
        object.__setattr__(self, "geometry", Geometry(self.geometry))
        object.__setattr__(self, "x_boundary", Boundary(self.x_boundary))
        object.__setattr__(self, "y_boundary", Boundary(self.y_boundary))
        if int(self.n_x) < 2 or int(self.n_y) < 2:
            raise ValueError(
                f"dimension out of range: n_x={self.n_x}, n_y={self.n_y} (need >= 2)"
            )
        if self.pad < 0:
            raise ValueError("pad must be non-negative")
        if not self.closed:
            want = (
                Boundary.PERIODIC
                if self.geometry is Geometry.NANOTUBE
                else Boundary.ABSORBING
            )
            if self.x_boundary is not want:
                raise ValueError(
                    f"{self.geometry.value} requires {want.value} x boundary"
                )
        if self.pad and self.x_boundary is Boundary.PERIODIC:
            raise ValueError("padding is only defined for absorbing x boundaries")

    @property
    def closed(self) -> bool:
        return self.y_boundary is Boundary.PERIODIC

    @property
    def composite(self) -> bool:
        """True when the lateral substep is the honeycomb diagonal move."""
        return self.geometry is not Geometry.SQUARE

    @property
    def periodic_x(self) -> bool:
        return self.x_boundary is Boundary.PERIODIC

    @property
    def periodic_y(self) -> bool:
        return self.y_boundary is Boundary.PERIODIC

    @property
    def width(self) -> int:
        return self.n_x + 2 * self.pad

    @property
    def shape(self) -> tuple[int, int]:
        return (self.width, self.n_y)

    @property
    def origin(self) -> Vertex:
        return Vertex(self.pad + self.n_x // 2, 0)

    @property
    def window(self) -> slice:
        """Column slice of the disordered ``n_x`` sublattice."""
        return slice(self.pad, self.pad + self.n_x)

    def centred_x(self, x):
        """Internal column index to origin-centred coordinate."""
        return np.asarray(x) - self.origin.x

    def contains(self, v: Vertex) -> bool:
        return 0 <= v.x < self.width and 0 <= v.y < self.n_y

    def to_dict(self) -> dict:
        d = {"geometry": self.geometry.value, "n_x": self.n_x, "n_y": self.n_y}
        if self.pad:
            d["pad"] = self.pad
        if self.closed:
            d["closed"] = True
        return d


def build_spec(geometry, n_x: int, n_y: int, *, pad: int = 0, closed: bool = False):
    """Validated :class:`LatticeSpec`; nanotubes get periodic columns."""
    geometry = Geometry(geometry)
    if closed:
        xb = yb = Boundary.PERIODIC
    else:
        xb = Boundary.PERIODIC if geometry is Geometry.NANOTUBE else Boundary.ABSORBING
        yb = Boundary.ABSORBING
    return LatticeSpec(geometry, int(n_x), int(n_y), xb, yb, int(pad))


# --------------------------------------------------------------------------
# sampling

def _grid(spec: LatticeSpec):
    xs = np.arange(spec.width)[:, None]
    ys = np.arange(spec.n_y)[None, :]
    return np.broadcast_to(xs, spec.shape), np.broadcast_to(ys, spec.shape)


def _sampled_regions(spec: LatticeSpec) -> dict[str, np.ndarray]:
    """Masks of edges that are random (True) rather than forced present."""
    xs, ys = _grid(spec)
    lo, hi = spec.pad, spec.pad + spec.n_x - 1
    in_win = (xs >= lo) & (xs <= hi)
    if spec.periodic_y:
        row_ok = np.ones(spec.shape, bool)
    else:
        row_ok = ys <= spec.n_y - 2
    out = {"y": in_win & row_ok}
    if spec.geometry is Geometry.SQUARE:
        if spec.periodic_x:
            out["x_pos"] = in_win.copy()
        else:
            out["x_pos"] = (xs >= lo) & (xs <= hi - 1)
    else:
        if spec.periodic_x:
            left = right = in_win
        else:
            left = in_win & (xs - 1 >= lo)
            right = in_win & (xs + 1 <= hi)
        out["diag_left"] = left & row_ok
        out["diag_right"] = right & row_ok
    return out


_STREAMS = {
    "x_pos": _rng.EDGE_X,
    "y": _rng.EDGE_Y,
    "diag_left": _rng.EDGE_DIAG_LEFT,
    "diag_right": _rng.EDGE_DIAG_RIGHT,
}


def edge_uniforms(spec: LatticeSpec, seed: int, composite_draws: int = 1):
    """Uniform draws behind every edge flag of one realization.

    Keys are origin-centred coordinates, so lattices of different width share
    the draws of the columns they have in common.  A flag is present iff its
    draw is below ``p``; composite moves with two draws take the maximum.
    """
    xs, ys = _grid(spec)
    px = spec.centred_x(xs)
    draws = {}
    for name in _sampled_regions(spec):
        stream = _STREAMS[name]
        u = _rng.uniform(seed, stream, px, ys, 0)
        if name.startswith("diag") and composite_draws == 2:
            u = np.maximum(u, _rng.uniform(seed, stream, px, ys, 1))
        draws[name] = u
    return draws


def flags_from_uniforms(spec: LatticeSpec, uniforms: dict, p: float) -> dict:
    """Threshold draws at ``p``; forced-present edges are set True.

    Works on draws with arbitrary leading (batch) dimensions.
    """
    regions = _sampled_regions(spec)
    return {k: (u < p) | ~regions[k] for k, u in uniforms.items()}


@dataclass(frozen=True, eq=False)
class EdgeConfig:
    """One disorder realization.

    Flags are ``present_x_pos`` (square: edge ``(x,y)-(x+1,y)``),
    ``present_y`` (edge ``(x,y)-(x,y+1)``) and, for honeycomb and nanotube,
    ``present_diag_left`` / ``present_diag_right`` for the composite moves
    ``(x,y) -> (x-1,y+1)`` and ``(x,y) -> (x+1,y+1)``.
    """

    spec: LatticeSpec
    p: float
    seed: int
    present_y: np.ndarray
    present_x_pos: np.ndarray | None = None
    present_diag_left: np.ndarray | None = None
    present_diag_right: np.ndarray | None = None
    composite_draws: int = 1
    _moves: tuple = field(default=None, repr=False)

    def flags(self) -> dict:
        d = {"y": self.present_y}
        if self.present_x_pos is not None:
            d["x_pos"] = self.present_x_pos
        if self.present_diag_left is not None:
            d["diag_left"] = self.present_diag_left
            d["diag_right"] = self.present_diag_right
        return d

    def moves(self):
        """``(left, right, up)`` boolean masks; see :func:`move_masks`."""
        if self._moves is None:
            object.__setattr__(self, "_moves", move_masks(self.spec, self.flags()))
        return self._moves

    def edge_fraction(self) -> float:
        """Fraction of present edges among the randomly sampled ones."""
        regions = _sampled_regions(self.spec)
        flags = self.flags()
        n = sum(int(regions[k].sum()) for k in flags)
        present = sum(int(flags[k][regions[k]].sum()) for k in flags)
        return present / n if n else 1.0

    def to_json(self) -> str:
        rec = {**self.spec.to_dict(), "p": self.p, "seed": self.seed}
        if self.composite_draws != 1:
            rec["composite_draws"] = self.composite_draws
        return json.dumps(rec, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EdgeConfig":
        rec = json.loads(text)
        spec = build_spec(
            rec["geometry"], rec["n_x"], rec["n_y"],
            pad=rec.get("pad", 0), closed=rec.get("closed", False),
        )
        return sample_edges(
            spec, rec["p"], rec["seed"], composite_draws=rec.get("composite_draws", 1)
        )


def sample_edges(spec: LatticeSpec, p: float, seed: int, composite_draws: int = 1):
    """Independent Bernoulli(p) edge flags from a stream keyed by ``seed``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if composite_draws not in (1, 2):
        raise ValueError("composite_draws must be 1 or 2")
    flags = flags_from_uniforms(spec, edge_uniforms(spec, seed, composite_draws), p)
    return EdgeConfig(
        spec=spec,
        p=float(p),
        seed=int(seed),
        present_y=flags["y"],
        present_x_pos=flags.get("x_pos"),
        present_diag_left=flags.get("diag_left"),
        present_diag_right=flags.get("diag_right"),
        composite_draws=composite_draws,
    )


def move_masks(spec: LatticeSpec, flags: dict):
    """Per-vertex masks of allowed moves ``(left, right, up)``.

    ``left`` gates the ``|down>`` component leaving towards ``x - 1``,
    ``right`` gates ``|up>`` towards ``x + 1`` (lateral edges for the square
    lattice, composite diagonal moves otherwise), ``up`` gates the directed
    move to ``y + 1``.  Leading batch dimensions are preserved.
    """
    if spec.composite:
        return flags["diag_left"], flags["diag_right"], flags["y"]
    right = flags["x_pos"]
    left = np.empty_like(right)
    left[..., 1:, :] = right[..., :-1, :]
    left[..., 0, :] = right[..., -1, :] if spec.periodic_x else True
    return left, right, flags["y"]


def trapping_mask(config: EdgeConfig) -> np.ndarray:
    """Vertices whose up edge and at least one lateral move are missing."""
    left, right, up = config.moves()
    return ~up & (~left | ~right)


def is_trapping_vertex(config: EdgeConfig, v: Vertex) -> bool:
    if not config.spec.contains(v):
        raise IndexError(f"vertex {v} outside lattice of shape {config.spec.shape}")
    return bool(trapping_mask(config)[v.x, v.y])
