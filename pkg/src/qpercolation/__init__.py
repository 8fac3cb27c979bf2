"""Directed discrete-time quantum walks on percolating lattices."""

__version__ = "0.1.0"

from .coin import CoinParams, FixedTheta, RandomTheta, coin_theta, coin_y, theta_field
from .lattice import (
    Boundary,
    EdgeConfig,
    Geometry,
    LatticeSpec,
    Vertex,
    build_spec,
    is_trapping_vertex,
    sample_edges,
)
from .walk import EvolvePolicy, InitialState, WalkState, evolve, init_state, step
from .observables import ZetaSample, exit_probability, trapped_mass_map, zeta_single
from .montecarlo import SweepResult, average_zeta, find_pa, sweep
from . import continuum
