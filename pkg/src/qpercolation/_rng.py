"""Counter-based uniform draws keyed by (seed, stream, coordinates).

Every draw is a pure function of its key, so a realization does not depend on
array shape, evaluation order or the number of workers.  The mixing function
is the SplitMix64 finalizer.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

# stream tags
EDGE_X = 1
EDGE_Y = 2
EDGE_DIAG_LEFT = 3
EDGE_DIAG_RIGHT = 4
THETA = 5
REALIZATION = 6
COIN_REALIZATION = 7


def _mix(z):
    with np.errstate(over="ignore"):
        z = z + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def _as_u64(a):
    return np.asarray(a, dtype=np.int64).astype(np.uint64)


def hash64(seed, stream, *coords):
    """Hash integer keys (broadcast together) to uint64."""
    z = _mix(np.array([int(seed) & _MASK], dtype=np.uint64))
    z = _mix(z ^ np.uint64(stream))
    for c in coords:
        z = _mix(z ^ _as_u64(c))
    return z


def uniform(seed, stream, *coords):
    """Uniform floats in [0, 1) keyed by ``(seed, stream, *coords)``."""
    bits = hash64(seed, stream, *coords) >> np.uint64(11)
    return bits.astype(np.float64) * (1.0 / (1 << 53))


def derive_seed(master_seed: int, stream: int, index: int) -> int:
    """Child seed for item ``index`` of a named stream."""
    return int(hash64(master_seed, stream, np.array([index]))[0])
