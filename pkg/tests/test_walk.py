import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _oracle import dilated_step, pack, trap_mass
from qpercolation import (
    CoinParams, FixedTheta, InitialState, EvolvePolicy, RandomTheta, Vertex, WalkState,
    build_spec, evolve, init_state, sample_edges, step, theta_field,
)
from qpercolation.lattice import EdgeConfig
from qpercolation.walk import (
    DOWN, SYMMETRIC, UP, apply_coin_shift_y_r2, apply_coin_x, apply_shift_diagonal,
    apply_shift_x, apply_shift_y_directed, evolve_batch, step_honeycomb,
)

S = np.sqrt(2) / 2
QUARTER = CoinParams(FixedTheta(np.pi / 4))
IDENTITY = CoinParams(FixedTheta(0.0))


def _full(geometry, nx, ny, **kw):
    spec = build_spec(geometry, nx, ny, **kw)
    return spec, sample_edges(spec, 1.0, 0)


def _edit(config, **flags):
    base = dict(present_y=config.present_y, present_x_pos=config.present_x_pos,
                present_diag_left=config.present_diag_left,
                present_diag_right=config.present_diag_right)
    base.update(flags)
    return EdgeConfig(config.spec, config.p, config.seed, **base)


def _budget(state):
    return state.coherent_mass + state.trapped.sum() + state.exited


def _run(spec, config, coins, init, t):
    state = init_state(spec, init)
    for _ in range(t):
        state = step(state, config, coins)
    return state


# -- initial state ----------------------------------------------------------

def test_init_down():
    spec = build_spec("square", 5, 4)
    s = init_state(spec, DOWN)
    assert s.psi_down[2, 0] == 1 and np.abs(s.psi_up).max() == 0
    assert s.exited == 0 and s.t == 0


def test_init_symmetric_spinor():
    s = init_state(build_spec("square", 5, 4))
    assert s.psi_down[2, 0] == pytest.approx(S)
    assert s.psi_up[2, 0] == pytest.approx(1j * S)


@given(st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
def test_init_normalised(delta, eta):
    s = init_state(build_spec("square", 3, 3), InitialState(delta, eta))
    assert abs(s.norm_inside - 1) < 1e-15


def test_init_out_of_bounds():
    with pytest.raises(IndexError):
        init_state(build_spec("square", 3, 3), InitialState(origin=Vertex(3, 0)))


# -- coin substep -----------------------------------------------------------

def test_coin_zero_field_is_identity():
    spec = build_spec("square", 4, 4)
    s = init_state(spec)
    out = apply_coin_x(s, np.zeros(spec.shape))
    assert np.array_equal(out.psi_down, s.psi_down) and np.array_equal(out.psi_up, s.psi_up)


def test_coin_quarter_on_down():
    spec = build_spec("square", 4, 4)
    out = apply_coin_x(init_state(spec, DOWN), np.full(spec.shape, np.pi / 4))
    assert out.psi_down[2, 0] == pytest.approx(S)
    assert out.psi_up[2, 0] == pytest.approx(-1j * S)


def test_coin_preserves_norm_for_any_field():
    spec = build_spec("square", 6, 6)
    rng = np.random.default_rng(0)
    s = WalkState(spec, rng.normal(size=spec.shape) + 0j, 1j * rng.normal(size=spec.shape),
                  np.zeros(spec.shape))
    out = apply_coin_x(s, rng.uniform(0, np.pi, spec.shape))
    assert abs(out.norm_inside - s.norm_inside) < 1e-12


def test_coin_shape_mismatch():
    with pytest.raises(ValueError):
        apply_coin_x(init_state(build_spec("square", 4, 4)), np.zeros((3, 4)))


# -- lateral shift ----------------------------------------------------------

def test_shift_x_moves_down_left():
    spec, cfg = _full("square", 10, 3)
    out = apply_shift_x(init_state(spec, InitialState(0.0, 0.0, Vertex(5, 0))), cfg)
    assert out.psi_down[4, 0] == 1 and abs(out.norm_inside - 1) < 1e-15


def test_shift_x_missing_right_edge_keeps_probability_at_vertex():
    # the blocked component is held on the vertex's trapping self-loop
    spec, cfg = _full("square", 10, 3)
    xp = cfg.present_x_pos.copy()
    xp[5, 0] = False
    s = init_state(spec, InitialState(np.pi / 2, 0.3, Vertex(5, 0)))
    out = apply_shift_x(s, _edit(cfg, present_x_pos=xp))
    assert out.probability()[5, 0] == pytest.approx(0.5)
    assert out.trapped[5, 0] == pytest.approx(0.5)
    assert out.psi_down[4, 0] == pytest.approx(s.psi_down[5, 0])


def test_shift_x_absorbs_at_the_boundary():
    spec, cfg = _full("square", 6, 3)
    s = init_state(spec, InitialState(np.pi, 0.0, Vertex(5, 1)))
    out = apply_shift_x(s, cfg)
    assert out.exited == pytest.approx(1.0)
    assert out.norm_inside < 1e-30


def test_shift_x_rejects_composite():
    spec, cfg = _full("honeycomb", 4, 4)
    with pytest.raises(ValueError):
        apply_shift_x(init_state(spec), cfg)


# -- directed substep -------------------------------------------------------

def test_shift_y_moves_the_whole_spinor():
    spec, cfg = _full("square", 5, 5)
    s = init_state(spec)
    out = apply_shift_y_directed(s, cfg)
    assert out.psi_down[2, 1] == s.psi_down[2, 0]
    assert out.psi_up[2, 1] == s.psi_up[2, 0]


def test_shift_y_missing_edge_keeps_probability_at_vertex():
    spec, cfg = _full("square", 5, 5)
    y = cfg.present_y.copy()
    y[2, 0] = False
    out = apply_shift_y_directed(init_state(spec), _edit(cfg, present_y=y))
    assert out.probability()[2, 0] == pytest.approx(1.0)
    assert out.coherent_mass == 0


def test_shift_y_exits_through_the_top():
    spec, cfg = _full("square", 5, 5)
    out = apply_shift_y_directed(init_state(spec, InitialState(origin=Vertex(2, 4))), cfg)
    assert out.exited == pytest.approx(1.0)


def test_coin_shift_r2_connected():
    spec, cfg = _full("square", 5, 5)
    out = apply_coin_shift_y_r2(init_state(spec, DOWN), cfg, 2)
    assert out.psi_down[2, 1] == pytest.approx(S)
    assert out.psi_up[2, 0] == pytest.approx(S)
    assert out.probability().sum() == pytest.approx(1.0)


def test_coin_shift_r2_missing_up_edge():
    spec, cfg = _full("square", 5, 5)
    y = cfg.present_y.copy()
    y[2, 0] = False
    out = apply_coin_shift_y_r2(init_state(spec, DOWN), _edit(cfg, present_y=y), 2)
    assert out.probability()[:, 1:].sum() == 0
    assert out.probability()[2, 0] == pytest.approx(1.0)


def test_coin_shift_r2_rejects_r1():
    spec, cfg = _full("square", 5, 5)
    with pytest.raises(ValueError):
        apply_coin_shift_y_r2(init_state(spec), cfg, 1)


# -- full steps -------------------------------------------------------------

def test_one_step_from_down():
    spec, cfg = _full("square", 9, 9)
    out = step(init_state(spec, DOWN), cfg, QUARTER)
    assert out.psi_down[3, 1] == pytest.approx(S)
    assert out.psi_up[5, 1] == pytest.approx(-1j * S)
    assert out.t == 1
    assert out.probability().sum() == pytest.approx(1.0)


def test_p0_freezes_at_origin():
    spec = build_spec("square", 9, 9)
    cfg = sample_edges(spec, 0.0, 0)
    s = step(init_state(spec), cfg, QUARTER)
    for _ in range(4):
        s = step(s, cfg, QUARTER)
    assert s.probability()[spec.origin.x, 0] == pytest.approx(1.0)
    assert s.trapped[spec.origin.x, 0] == pytest.approx(1.0)


def test_honeycomb_step_climbs_two_rows():
    spec, cfg = _full("honeycomb", 9, 9)
    out = step_honeycomb(init_state(spec, DOWN), cfg, IDENTITY)
    assert out.psi_down[3, 2] == 1
    # generic step dispatches on geometry
    out2 = step(init_state(spec, DOWN), cfg, IDENTITY)
    assert np.array_equal(out.psi_down, out2.psi_down)


def test_honeycomb_missing_diagonal_stays_put():
    spec, cfg = _full("honeycomb", 9, 9)
    dl = cfg.present_diag_left.copy()
    dl[4, 0] = False
    out = step_honeycomb(init_state(spec, DOWN), _edit(cfg, present_diag_left=dl), IDENTITY)
    assert out.probability()[4, 0] == pytest.approx(1.0)
    assert out.probability()[:, 1:].sum() == 0


def test_diagonal_shift_alone():
    spec, cfg = _full("honeycomb", 9, 9)
    out = apply_shift_diagonal(init_state(spec, UP), cfg)
    assert out.psi_up[5, 1] == 1


def test_nanotube_wraps_columns():
    spec, cfg = _full("nanotube", 6, 9)
    s = init_state(spec, InitialState(np.pi, 0.0, Vertex(5, 0)))
    out = step_honeycomb(s, cfg, IDENTITY)
    assert abs(out.psi_up[0, 2]) == pytest.approx(1.0)
    assert out.exited == 0


def test_honeycomb_step_rejects_square():
    spec, cfg = _full("square", 4, 4)
    with pytest.raises(ValueError):
        step_honeycomb(init_state(spec), cfg)


def test_config_from_other_lattice_rejected():
    spec, _ = _full("square", 4, 4)
    _, other = _full("square", 5, 5)
    with pytest.raises(ValueError):
        step(init_state(spec), other)


# -- evolve -----------------------------------------------------------------

@pytest.mark.parametrize("theta", [0.0, np.pi / 4, 2.0])
def test_evolve_fully_connected_exits(theta):
    spec, cfg = _full("square", 30, 30)
    s, reason = evolve(init_state(spec), cfg, CoinParams(FixedTheta(theta)))
    assert reason == "converged"
    assert s.norm_inside <= 1e-9 and s.exited >= 1 - 1e-9


def test_evolve_p0_converges_immediately():
    spec = build_spec("square", 10, 10)
    s, reason = evolve(init_state(spec), sample_edges(spec, 0.0, 0))
    assert reason == "converged" and s.t == 1 and s.exited == 0


def test_evolve_reports_max_steps():
    spec, cfg = _full("square", 30, 30)
    s, reason = evolve(init_state(spec), cfg, policy=EvolvePolicy(max_steps=5))
    assert reason == "max_steps" and s.t == 5


def test_default_policy_budget():
    assert EvolvePolicy().resolve(build_spec("square", 50, 40)).max_steps == 360


# -- dense oracle -----------------------------------------------------------

@pytest.mark.parametrize("geometry", ["square", "honeycomb", "nanotube"])
@pytest.mark.parametrize("r", [1, 2])
def test_sparse_step_matches_dilated_unitary(geometry, r):
    rng = np.random.default_rng(hash((geometry, r)) % 2**32)
    spec = build_spec(geometry, 4, 4, closed=True)
    for _ in range(10):
        cfg = sample_edges(spec, rng.uniform(0.2, 1.0), int(rng.integers(2**62)))
        theta = rng.uniform(0, np.pi, spec.shape)
        u, n = dilated_step(geometry, 4, 4, cfg.flags(), theta, r)
        assert np.abs(u.conj().T @ u - np.eye(6 * n)).max() < 1e-10
        z = rng.normal(size=(2, 4, 4)) + 1j * rng.normal(size=(2, 4, 4))
        z /= np.linalg.norm(z)
        s = WalkState(spec, z[0], z[1], np.zeros(spec.shape))
        out = step(s, cfg, CoinParams(FixedTheta(), r), theta=theta)
        ref = u @ np.concatenate([pack(z[0], z[1]), np.zeros(4 * n)])
        assert np.abs(ref[: 2 * n] - pack(out.psi_down, out.psi_up)).max() < 1e-12
        assert np.abs(trap_mass(ref, n, 4, 4) - out.trapped).max() < 1e-12


def test_basis_matrix_unitary_when_fully_connected():
    spec, cfg = _full("square", 4, 4, closed=True)
    n = 16
    cols = []
    for k in range(2 * n):
        e = np.zeros(2 * n, complex)
        e[k] = 1
        s = WalkState(spec, e[:n].reshape(4, 4), e[n:].reshape(4, 4), np.zeros((4, 4)))
        out = step(s, cfg, CoinParams(FixedTheta(0.7), 2))
        cols.append(pack(out.psi_down, out.psi_up))
    m = np.array(cols).T
    assert np.abs(m.conj().T @ m - np.eye(2 * n)).max() < 1e-10


# -- invariants -------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["square", "honeycomb", "nanotube"]), st.integers(1, 3),
       st.floats(0, 1), st.integers(0, 2**63 - 1), st.integers(0, 2))
def test_probability_budget_every_step(geometry, r, p, seed, pad):
    pad = pad if geometry != "nanotube" else 0
    spec = build_spec(geometry, 8, 7, pad=pad)
    cfg = sample_edges(spec, p, seed)
    coins = CoinParams(RandomTheta(seed % 1000), r)
    s = init_state(spec)
    last = 0.0
    for _ in range(12):
        s = step(s, cfg, coins)
        assert abs(_budget(s) - 1) < 1e-9
        assert s.exited >= last - 1e-15
        last = s.exited


def test_support_cone():
    spec, cfg = _full("square", 60, 60)
    x0 = spec.origin.x
    s = init_state(spec)
    xs = np.arange(spec.width)[:, None]
    ys = np.arange(spec.n_y)[None, :]
    for t in range(1, 26):
        s = step(s, cfg, CoinParams(FixedTheta(np.pi / 4), 2))
        outside = (np.abs(xs - x0) > t) | (ys > t)
        assert np.all(s.probability()[np.broadcast_to(outside, spec.shape)] == 0)


def test_up_and_down_mirror_about_half_time():
    spec, cfg = _full("square", 80, 80)
    coins = CoinParams(FixedTheta(np.pi / 4), 2)
    t = 30
    pu = _run(spec, cfg, coins, UP, t).probability()[:, : t + 1]
    pd = _run(spec, cfg, coins, DOWN, t).probability()[:, : t + 1]
    assert np.abs(pu - pd[:, ::-1]).max() < 1e-10


@pytest.mark.parametrize("r", [1, 2])
def test_x_reflection_for_real_superposition(r):
    # with this coin the reflection symmetric spinor is (|down> + |up>)/sqrt(2)
    spec, cfg = _full("square", 80, 80)
    x0 = spec.origin.x
    prob = _run(spec, cfg, CoinParams(FixedTheta(np.pi / 4), r),
                InitialState(np.pi / 2, 0.0), 30).probability()
    d = np.arange(1, 35)
    assert np.abs(prob[x0 + d] - prob[x0 - d]).max() < 1e-10


def test_trapped_mass_sits_next_to_missing_moves():
    spec = build_spec("square", 30, 30)
    cfg = sample_edges(spec, 0.9, 17)
    s, reason = evolve(init_state(spec), cfg, QUARTER)
    assert reason == "converged"
    left, right, up = cfg.moves()
    blocked = ~left | ~right | ~up
    assert s.trapped[~blocked].sum() == 0
    assert s.coherent_mass < 1e-8


# -- batched evolution ------------------------------------------------------

@pytest.mark.parametrize("geometry,pad,r", [
    ("square", 0, 1), ("square", 4, 1), ("honeycomb", 0, 1), ("nanotube", 0, 1),
    ("square", 0, 2), ("honeycomb", 2, 2),
])
def test_batch_matches_single_runs(geometry, pad, r):
    from qpercolation.lattice import move_masks
    from qpercolation.observables import exit_probability

    spec = build_spec(geometry, 16, 14, pad=pad)
    coins = CoinParams(FixedTheta(np.pi / 4), r)
    policy = EvolvePolicy(max_steps=300)
    cfgs = [sample_edges(spec, 0.93, s) for s in range(5)]
    moves = tuple(np.stack(m) for m in zip(*(c.moves() for c in cfgs)))
    theta = theta_field(spec, coins)
    res = evolve_batch(spec, moves, theta, coins, SYMMETRIC, policy)
    for i, cfg in enumerate(cfgs):
        s, reason = evolve(init_state(spec), cfg, coins, policy)
        assert res["converged"][i] == (reason == "converged")
        assert res["steps"][i] == s.t
        assert abs(res["zeta"][i] - exit_probability(s)) < 1e-12
        assert abs(res["trapped"][i] - s.trapped[spec.window, :].sum()) < 1e-12
