"""Directed discrete-time quantum walk on complete and broken lattices.

A step is a lateral substep (coin ``C_theta`` then conditional shift of
``|down>`` towards ``x - 1`` and ``|up>`` towards ``x + 1``) followed by a
directed substep along ``+y``.  On the honeycomb and nanotube lattices the
lateral shift is the composite diagonal move ``(x -+ 1, y + 1)``.

Missing edges
-------------
A component whose move crosses a missing edge is put on a self-loop of its
own at the current vertex.  That self-loop state is decoupled from the edge
basis the coins act on, so its probability is frozen there for good; it is
kept per vertex in ``WalkState.trapped``.  Every amplitude thus either moves
along a present edge or is trapped, so each substep is an isometry, and the
probability budget ``sum |psi|^2 + sum trapped + exited = 1`` holds exactly.

All kernels accept arrays with leading batch dimensions ``(..., width, n_y)``
so that many realizations can be propagated at once.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import pi

import numpy as np

from .coin import CoinParams, coin_y, theta_field
from .lattice import EdgeConfig, LatticeSpec, Vertex

__all__ = [
    "WalkState",
    "InitialState",
    "EvolvePolicy",
    "init_state",
    "apply_coin_x",
    "apply_shift_x",
    "apply_shift_diagonal",
    "apply_shift_y_directed",
    "apply_coin_shift_y_r2",
    "step",
    "step_honeycomb",
    "evolve",
    "CONVERGED",
    "MAX_STEPS",
]

CONVERGED = "converged"
MAX_STEPS = "max_steps"


def _mass(z):
    return z.real * z.real + z.imag * z.imag


def _edge_sum(a):
    # sum over the last axis of a boundary slice -> one value per realization
    return a.sum(axis=-1)


@dataclass
class WalkState:
    """Amplitudes ``psi_down``/``psi_up``, trapped mass and exited mass.

    ``exited`` is the probability absorbed at the boundary of the simulated
    region (a scalar, or one value per realization when batched).
    """

    spec: LatticeSpec
    psi_down: np.ndarray
    psi_up: np.ndarray
    trapped: np.ndarray
    exited: np.ndarray | float = 0.0
    t: int = 0

    @property
    def coherent_mass(self):
        return (_mass(self.psi_down) + _mass(self.psi_up)).sum(axis=(-2, -1))

    @property
    def norm_inside(self):
        """Probability still on the simulated region (coherent + trapped)."""
        return self.coherent_mass + self.trapped.sum(axis=(-2, -1))

    def probability(self) -> np.ndarray:
        """Per-vertex probability of finding the walker there."""
        return _mass(self.psi_down) + _mass(self.psi_up) + self.trapped

    def copy(self) -> "WalkState":
        return replace(
            self,
            psi_down=self.psi_down.copy(),
            psi_up=self.psi_up.copy(),
            trapped=self.trapped.copy(),
            exited=np.copy(self.exited),
        )


@dataclass(frozen=True)
class InitialState:
    """Spinor ``cos(delta/2)|down> + exp(i eta) sin(delta/2)|up>``.

    The default is the x-symmetric state ``(|down> + i|up>)/sqrt(2)``;
    ``origin=None`` means the lattice origin ``(n_x // 2, 0)``.
    """

    delta: float = pi / 2
    eta: float = pi / 2
    origin: Vertex | None = None

    def spinor(self) -> tuple[complex, complex]:
        return (
            complex(np.cos(self.delta / 2)),
            complex(np.exp(1j * self.eta) * np.sin(self.delta / 2)),
        )


DOWN = InitialState(delta=0.0, eta=0.0)
UP = InitialState(delta=pi, eta=0.0)
SYMMETRIC = InitialState()


@dataclass(frozen=True)
class EvolvePolicy:
    """Stop at ``max_steps`` or once coherent mass drops below ``eps_stat``.

    ``max_steps=None`` resolves to ``4 * (n_x + n_y)``.
    """

    max_steps: int | None = None
    eps_stat: float = 1e-8

    def resolve(self, spec: LatticeSpec) -> "EvolvePolicy":
        if self.max_steps is not None:
            return self
        return replace(self, max_steps=4 * (spec.n_x + spec.n_y))


def init_state(spec: LatticeSpec, init: InitialState = SYMMETRIC, batch=()) -> WalkState:
    origin = init.origin or spec.origin
    if not spec.contains(origin):
        raise IndexError(f"origin {origin} outside lattice of shape {spec.shape}")
    shape = tuple(batch) + spec.shape
    down = np.zeros(shape, np.complex128)
    up = np.zeros(shape, np.complex128)
    a, b = init.spinor()
    down[..., origin.x, origin.y] = a
    up[..., origin.x, origin.y] = b
    return WalkState(spec, down, up, np.zeros(shape), np.zeros(tuple(batch)), 0)


# --------------------------------------------------------------------------
# kernels on raw arrays

def _translate(spec: LatticeSpec, f, dx: int, dy: int):
    """Move field ``f`` by ``(dx, dy)``; return (moved, mass leaving the region)."""
    lost = 0.0
    if dx:
        if spec.periodic_x:
            f = np.roll(f, dx, axis=-2)
        else:
            out = np.zeros_like(f)
            if dx < 0:
                out[..., :-1, :] = f[..., 1:, :]
                lost = _edge_sum(_mass(f[..., 0, :]))
            else:
                out[..., 1:, :] = f[..., :-1, :]
                lost = _edge_sum(_mass(f[..., -1, :]))
            f = out
    if dy:
        if spec.periodic_y:
            f = np.roll(f, dy, axis=-1)
        else:
            out = np.zeros_like(f)
            out[..., :, 1:] = f[..., :, :-1]
            lost = lost + _edge_sum(_mass(f[..., :, -1]))
            f = out
    return f, lost


def _gate(f, open_mask, trapped):
    """Zero the blocked part of ``f`` and add its mass to ``trapped`` in place."""
    blocked = ~open_mask
    trapped += _mass(f) * blocked
    return np.where(open_mask, f, 0)


def _coin_x(down, up, cos, msin):
    return cos * down + msin * up, msin * down + cos * up


def _lateral(spec, down, up, left, right, trapped):
    dy = 1 if spec.composite else 0
    down, l1 = _translate(spec, _gate(down, left, trapped), -1, dy)
    up, l2 = _translate(spec, _gate(up, right, trapped), +1, dy)
    return down, up, l1 + l2


def _directed(spec, down, up, upmask, trapped):
    down, l1 = _translate(spec, _gate(down, upmask, trapped), 0, 1)
    up, l2 = _translate(spec, _gate(up, upmask, trapped), 0, 1)
    return down, up, l1 + l2


def _coin_directed(spec, down, up, upmask, r, trapped):
    cy = coin_y(r)
    a, b = cy[0, 0].real, cy[0, 1].real
    plus, loop = a * down + b * up, b * down - a * up
    plus, lost = _translate(spec, _gate(plus, upmask, trapped), 0, 1)
    return plus, loop, lost


def _step_arrays(spec, down, up, trapped, moves, cos, msin, r):
    left, right, upmask = moves
    down, up = _coin_x(down, up, cos, msin)
    down, up, lost = _lateral(spec, down, up, left, right, trapped)
    if r == 1:
        down, up, l2 = _directed(spec, down, up, upmask, trapped)
    else:
        down, up, l2 = _coin_directed(spec, down, up, upmask, r, trapped)
    return down, up, lost + l2


# --------------------------------------------------------------------------
# public operations on WalkState

def _check_shape(state: WalkState, arr, what: str):
    if np.shape(arr)[-2:] != state.spec.shape:
        raise ValueError(
            f"{what} shape {np.shape(arr)} does not match lattice {state.spec.shape}"
        )


def _moves(state: WalkState, config):
    if isinstance(config, EdgeConfig):
        if config.spec != state.spec:
            raise ValueError("edge configuration belongs to a different lattice")
        return config.moves()
    return config


def apply_coin_x(state: WalkState, field) -> WalkState:
    """Apply ``C_theta(x, y)`` at every vertex; ``field`` holds the angles."""
    _check_shape(state, field, "theta field")
    field = np.asarray(field, float)
    down, up = _coin_x(state.psi_down, state.psi_up, np.cos(field), -1j * np.sin(field))
    return replace(state, psi_down=down, psi_up=up)


def apply_shift_x(state: WalkState, config) -> WalkState:
    """Lateral conditional shift of the square lattice."""
    if state.spec.composite:
        raise ValueError("apply_shift_x is for the square lattice; use apply_shift_diagonal")
    left, right, _ = _moves(state, config)
    trapped = state.trapped.copy()
    down, up, lost = _lateral(state.spec, state.psi_down, state.psi_up, left, right, trapped)
    return replace(state, psi_down=down, psi_up=up, trapped=trapped,
                   exited=state.exited + lost)


def apply_shift_diagonal(state: WalkState, config) -> WalkState:
    """Composite honeycomb shift: ``|down> -> (x-1, y+1)``, ``|up> -> (x+1, y+1)``."""
    if not state.spec.composite:
        raise ValueError("apply_shift_diagonal needs a honeycomb or nanotube lattice")
    left, right, _ = _moves(state, config)
    trapped = state.trapped.copy()
    down, up, lost = _lateral(state.spec, state.psi_down, state.psi_up, left, right, trapped)
    return replace(state, psi_down=down, psi_up=up, trapped=trapped,
                   exited=state.exited + lost)


def apply_shift_y_directed(state: WalkState, config) -> WalkState:
    """``r = 1`` directed shift: the whole spinor moves to ``y + 1``."""
    _, _, upmask = _moves(state, config)
    trapped = state.trapped.copy()
    down, up, lost = _directed(state.spec, state.psi_down, state.psi_up, upmask, trapped)
    return replace(state, psi_down=down, psi_up=up, trapped=trapped,
                   exited=state.exited + lost)


def apply_coin_shift_y_r2(state: WalkState, config, r: int) -> WalkState:
    """Directed coin ``C_y(r)``, then ``|+> = |down>`` moves up, ``|up>`` loops."""
    if int(r) != r or r < 2:
        raise ValueError(f"apply_coin_shift_y_r2 needs r >= 2, got {r}")
    _, _, upmask = _moves(state, config)
    trapped = state.trapped.copy()
    down, up, lost = _coin_directed(
        state.spec, state.psi_down, state.psi_up, upmask, int(r), trapped
    )
    return replace(state, psi_down=down, psi_up=up, trapped=trapped,
                   exited=state.exited + lost)


def _theta(state, coins, theta):
    if theta is None:
        theta = theta_field(state.spec, coins)
    _check_shape(state, theta, "theta field")
    return theta


def _full_step(state, config, coins, theta):
    theta = _theta(state, coins, theta)
    trapped = state.trapped.copy()
    down, up, lost = _step_arrays(
        state.spec, state.psi_down, state.psi_up, trapped, _moves(state, config),
        np.cos(theta), -1j * np.sin(theta), coins.r,
    )
    return WalkState(state.spec, down, up, trapped, state.exited + lost, state.t + 1)


def step(state: WalkState, config, coins: CoinParams = CoinParams(), theta=None):
    """One complete step: lateral substep, then directed substep.

    Honeycomb and nanotube lattices dispatch to :func:`step_honeycomb`.
    ``theta`` may carry a precomputed angle field.
    """
    if state.spec.composite:
        return step_honeycomb(state, config, coins, theta)
    return _full_step(state, config, coins, theta)


def step_honeycomb(state: WalkState, config, coins: CoinParams = CoinParams(), theta=None):
    """One step on the honeycomb (or nanotube) lattice.

    Lateral coin, composite diagonal shift, then the same directed substep
    as on the square lattice.  One unobstructed step climbs two rows.
    """
    if not state.spec.composite:
        raise ValueError("step_honeycomb needs a honeycomb or nanotube lattice")
    return _full_step(state, config, coins, theta)


def evolve(state: WalkState, config, coins: CoinParams = CoinParams(),
           policy: EvolvePolicy = EvolvePolicy(), theta=None):
    """Step until the coherent mass falls below ``eps_stat`` or ``max_steps``.

    Returns ``(state, reason)`` where reason is ``"converged"`` or
    ``"max_steps"``.  Below ``eps_stat`` everything left on the lattice is
    trapped (up to ``eps_stat``), so further steps cannot change ``exited``
    by more than that.
    """
    policy = policy.resolve(state.spec)
    theta = _theta(state, coins, theta)
    moves = _moves(state, config)
    cos, msin = np.cos(theta), -1j * np.sin(theta)
    spec, r = state.spec, coins.r
    down, up = state.psi_down, state.psi_up
    trapped = state.trapped.copy()
    exited = np.copy(state.exited)
    t = state.t
    reason = MAX_STEPS
    while t < policy.max_steps:
        down, up, lost = _step_arrays(spec, down, up, trapped, moves, cos, msin, r)
        exited = exited + lost
        t += 1
        if np.all((_mass(down) + _mass(up)).sum(axis=(-2, -1)) < policy.eps_stat):
            reason = CONVERGED
            break
    return WalkState(spec, down, up, trapped, exited, t), reason


def evolve_batch(spec: LatticeSpec, moves, theta, coins: CoinParams,
                 init: InitialState, policy: EvolvePolicy):
    """Propagate a batch of realizations, freezing each one at convergence.

    ``moves`` and ``theta`` carry a leading batch axis of length ``B``
    (``theta`` may also be a single ``spec.shape`` field).  Returns a dict of
    per-realization arrays: ``zeta`` (probability outside the window),
    ``trapped``, ``steps`` and ``converged``.  Each value depends only on its
    own realization, never on the rest of the batch.
    """
    policy = policy.resolve(spec)
    if coins.r == 1 and not spec.periodic_y:
        return _front_batch(spec, moves, theta, init, policy)
    b = moves[2].shape[0]
    state = init_state(spec, init, batch=(b,))
    down, up, trapped = state.psi_down, state.psi_up, state.trapped
    exited = np.zeros(b)
    cos, msin = np.cos(theta), -1j * np.sin(theta)
    win = spec.window
    res = {
        "zeta": np.zeros(b),
        "trapped": np.zeros(b),
        "steps": np.full(b, policy.max_steps, dtype=np.int64),
        "converged": np.zeros(b, bool),
    }
    active = np.ones(b, bool)

    def record(idx, t):
        outside = exited[idx]
        if spec.pad:
            prob = _mass(down[idx]) + _mass(up[idx]) + trapped[idx]
            outside = outside + prob[:, : win.start].sum(axis=(-2, -1))
            outside = outside + prob[:, win.stop:].sum(axis=(-2, -1))
        res["zeta"][idx] = outside
        res["trapped"][idx] = trapped[idx][:, win].sum(axis=(-2, -1))
        res["steps"][idx] = t

    t = 0
    while t < policy.max_steps and active.any():
        down, up, lost = _step_arrays(spec, down, up, trapped, moves, cos, msin, coins.r)
        exited = exited + lost
        t += 1
        coherent = (_mass(down) + _mass(up)).sum(axis=(-2, -1))
        done = active & (coherent < policy.eps_stat)
        if done.any():
            idx = np.flatnonzero(done)
            record(idx, t)
            res["converged"][idx] = True
            active &= ~done
    if active.any():
        record(np.flatnonzero(active), t)
    return res


def _front_batch(spec: LatticeSpec, moves, theta, init: InitialState,
                 policy: EvolvePolicy):
    """``r = 1`` fast path of :func:`evolve_batch`.

    With the fully directed substep every surviving amplitude climbs one row
    per step (two on composite lattices), so the coherent state lives on a
    single row and only that row is propagated.
    """
    left, right, upmask = moves
    b = upmask.shape[0]
    origin = init.origin or spec.origin
    if not spec.contains(origin):
        raise IndexError(f"origin {origin} outside lattice of shape {spec.shape}")
    a0, b0 = init.spinor()
    down = np.zeros((b, spec.width), np.complex128)
    up = np.zeros((b, spec.width), np.complex128)
    down[:, origin.x] = a0
    up[:, origin.x] = b0
    theta = np.broadcast_to(theta, upmask.shape)
    exited = np.zeros(b)
    trapped = np.zeros(b)
    res = {
        "zeta": np.zeros(b),
        "trapped": np.zeros(b),
        "steps": np.full(b, policy.max_steps, dtype=np.int64),
        "converged": np.zeros(b, bool),
    }
    climb = 1 if spec.composite else 0
    win = spec.window
    y, t = origin.y, 0

    def lateral_row(f, dx):
        if spec.periodic_x:
            return np.roll(f, dx, axis=-1), 0.0
        out = np.zeros_like(f)
        if dx < 0:
            out[:, :-1] = f[:, 1:]
            return out, _mass(f[:, 0])
        out[:, 1:] = f[:, :-1]
        return out, _mass(f[:, -1])

    def gate(f, m):
        nonlocal trapped
        trapped = trapped + (_mass(f) * ~m).sum(axis=-1)
        return np.where(m, f, 0)

    def record(t):
        out = exited
        if spec.pad:
            prob = _mass(down) + _mass(up)
            out = out + prob[:, : win.start].sum(axis=-1) + prob[:, win.stop:].sum(axis=-1)
        res["zeta"][:] = out
        res["trapped"][:] = trapped
        res["steps"][:] = t

    converged = np.zeros(b, bool)
    frozen = {}
    while t < policy.max_steps:
        if y >= spec.n_y:
            # everything still coherent has left through the top row
            exited = exited + (_mass(down) + _mass(up)).sum(axis=-1)
            down = np.zeros_like(down)
            up = np.zeros_like(up)
        else:
            th = theta[:, :, y]
            c, ms = np.cos(th), -1j * np.sin(th)
            down, up = c * down + ms * up, ms * down + c * up
            down, l1 = lateral_row(gate(down, left[:, :, y]), -1)
            up, l2 = lateral_row(gate(up, right[:, :, y]), +1)
            exited = exited + l1 + l2
            y += climb
            if y >= spec.n_y:
                exited = exited + (_mass(down) + _mass(up)).sum(axis=-1)
                down = np.zeros_like(down)
                up = np.zeros_like(up)
            else:
                m = upmask[:, :, y]
                down, up = gate(down, m), gate(up, m)
                y += 1
                if y >= spec.n_y:
                    exited = exited + (_mass(down) + _mass(up)).sum(axis=-1)
                    down = np.zeros_like(down)
                    up = np.zeros_like(up)
        t += 1
        coherent = (_mass(down) + _mass(up)).sum(axis=-1)
        done = ~converged & (coherent < policy.eps_stat)
        if done.any():
            record(t)
            for i in np.flatnonzero(done):
                frozen[i] = (res["zeta"][i], res["trapped"][i], t)
            converged |= done
            if converged.all():
                break
    record(t)
    for i, (z, tr, s) in frozen.items():
        res["zeta"][i], res["trapped"][i], res["steps"][i] = z, tr, s
    res["converged"] = converged
    return res
