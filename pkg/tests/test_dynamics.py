"""Integrators, conservation monitors, measure diagnostics, interpolation."""

import numpy as np
import pytest

from chaplygin import (
    IntegratorConfig,
    NonFiniteState,
    Trajectory,
    divergence_defect,
    hermite_sample,
    integrate,
    invariant_drift,
    lift_reduced_state,
    monitor_series,
    project_rho,
    reparametrized_integrate,
    rk4_step,
    sample_reduced_state,
    split_full,
)

from conftest import asymmetric_body, standard_body

CHAPLYGIN_START = np.array([0.0, 0.0, 1.0, 0.3, -0.1, 0.2])


# ------------------------------------------------------------- configuration


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(dt=0.0, t_final=1.0)
    with pytest.raises(ValueError):
        IntegratorConfig(dt=1e-3, t_final=-1.0)
    with pytest.raises(ValueError):
        IntegratorConfig(dt=2.0, t_final=1.0)
    with pytest.raises(ValueError):
        IntegratorConfig(dt=1e-3, t_final=1.0, method="euler")


def test_config_step_count():
    assert IntegratorConfig(dt=1e-3, t_final=10.0).n_steps == 10_000
    assert IntegratorConfig(dt=0.25, t_final=1.0).n_steps == 4


def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 0.0]), states=np.zeros((2, 6)))
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 1.0, 2.0]), states=np.zeros((2, 6)))


# ------------------------------------------------------------------ RK4 core


def test_rk4_step_is_truncated_exponential():
    lam = -0.7
    dt = 0.1
    y = np.array([2.0])
    stepped = rk4_step(lambda s: lam * s, y, dt)
    z = lam * dt
    expected = 2.0 * (1.0 + z + z**2 / 2 + z**3 / 6 + z**4 / 24)
    assert stepped[0] == pytest.approx(expected, rel=1e-15)


# ----------------------------------------------------------------- integrate


def test_integrate_rejects_bad_shapes():
    body = standard_body(2)
    with pytest.raises(ValueError):
        integrate(body, np.zeros(5), IntegratorConfig(dt=0.1, t_final=1.0))


def test_integrate_rejects_nonfinite_initial():
    body = standard_body(2)
    bad = CHAPLYGIN_START.copy()
    bad[4] = np.nan
    with pytest.raises(NonFiniteState):
        integrate(body, bad, IntegratorConfig(dt=0.1, t_final=1.0))


def test_integrate_raises_on_blow_up():
    body = standard_body(0)
    config = IntegratorConfig(dt=1e6, t_final=2e6)
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(NonFiniteState):
            integrate(body, CHAPLYGIN_START, config)


def test_equilibrium_is_fixed(rank):
    body = standard_body(rank)
    state = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.7])
    traj = integrate(body, state, IntegratorConfig(dt=1e-2, t_final=10.0))
    assert np.max(np.abs(traj.states - state)) <= 1e-12


def test_integrate_fills_monitors(rank):
    body = standard_body(rank)
    traj = integrate(body, CHAPLYGIN_START, IntegratorConfig(dt=1e-2, t_final=0.1))
    assert set(traj.monitors) == {"H", "C1", "C2", "F"}
    assert all(len(v) == len(traj.times) for v in traj.monitors.values())
    series = monitor_series(body, traj)
    for name, vals in series.items():
        assert np.array_equal(vals, traj.monitors[name])


def test_short_run_conserves_monitors(rank):
    body = asymmetric_body(rank)
    traj = integrate(body, sample_reduced_state(seed=rank), IntegratorConfig(dt=1e-3, t_final=2.0))
    drifts = invariant_drift(body, traj)
    assert max(drifts.values()) <= 1e-10


def test_full_run_projects_onto_reduced_run():
    body = standard_body(2)
    config = IntegratorConfig(dt=1e-3, t_final=2.0)
    reduced = integrate(body, CHAPLYGIN_START, config)
    full = integrate(body, lift_reduced_state(CHAPLYGIN_START), config)
    worst = np.max(np.abs(np.array([project_rho(s) for s in full.states]) - reduced.states))
    assert worst <= 1e-8


def test_full_run_keeps_attitude_orthonormal():
    body = asymmetric_body(3)
    full = integrate(
        body,
        lift_reduced_state(sample_reduced_state(seed=9)),
        IntegratorConfig(dt=1e-3, t_final=2.0),
    )
    worst = 0.0
    for s in full.states:
        g = split_full(s)[0]
        worst = max(worst, np.max(np.abs(g.T @ g - np.eye(3))))
    assert worst <= 1e-8


def test_gamma_renormalization_flag():
    body = standard_body(2)
    start = sample_reduced_state(seed=12)
    traj = integrate(
        body, start, IntegratorConfig(dt=1e-2, t_final=1.0, renormalize_gamma=True)
    )
    norms = np.linalg.norm(traj.states[:, :3], axis=1)
    assert np.max(np.abs(norms - 1.0)) <= 1e-14


def test_rk4_order_via_step_halving():
    body = standard_body(0)
    start = sample_reduced_state(seed=2)
    t_final = 1.0

    def end_state(dt):
        return integrate(body, start, IntegratorConfig(dt=dt, t_final=t_final)).states[-1]

    ref = end_state(1e-2 / 16.0)
    err_coarse = np.max(np.abs(end_state(1e-2) - ref))
    err_fine = np.max(np.abs(end_state(0.5e-2) - ref))
    assert 12.0 <= err_coarse / err_fine <= 20.0


# ------------------------------------------------------------ invariant drift


def test_invariant_drift_detects_tampering():
    body = standard_body(2)
    traj = integrate(body, CHAPLYGIN_START, IntegratorConfig(dt=1e-2, t_final=1.0))
    clean = invariant_drift(body, traj)
    assert max(clean.values()) <= 1e-10
    corrupted_states = traj.states.copy()
    corrupted_states[50:, 3:] *= 2.0  # scale K mid-stream
    corrupted = Trajectory(times=traj.times, states=corrupted_states)
    drifts = invariant_drift(body, corrupted)
    assert drifts["F"] > 1e-3
    assert drifts["H"] > 1e-3
    assert drifts["C2"] <= 1e-10  # gamma untouched


# ------------------------------------------------------- time reparametrization


def test_reparametrization_trivial_without_conformal_factor():
    body = standard_body(0)
    start = sample_reduced_state(seed=3)
    config = IntegratorConfig(dt=1e-3, t_final=1.0)
    plain = integrate(body, start, config)
    scaled = reparametrized_integrate(body, start, config)
    assert np.max(np.abs(plain.states - scaled.states)) <= 1e-12
    assert np.max(np.abs(scaled.t_recovered - scaled.times)) <= 1e-12


@pytest.mark.parametrize("rank_r", [1, 2])
def test_reparametrized_run_recovers_physical_time(rank_r):
    body = standard_body(rank_r)
    start = sample_reduced_state(seed=4)
    config = IntegratorConfig(dt=1e-3, t_final=1.0)
    scaled = reparametrized_integrate(body, start, config)
    assert scaled.t_recovered[0] == 0.0
    assert np.all(np.diff(scaled.t_recovered) > 0.0)
    direct = integrate(body, start, IntegratorConfig(dt=1e-3, t_final=float(scaled.t_recovered[-1])))
    worst = 0.0
    for idx in range(0, len(scaled.times), 50):
        t_phys = float(scaled.t_recovered[idx])
        if t_phys > direct.times[-1]:
            break
        worst = max(worst, np.max(np.abs(hermite_sample(body, direct, t_phys) - scaled.states[idx])))
    assert worst <= 1e-10


def test_reparametrized_integrate_needs_reduced_state():
    body = standard_body(2)
    with pytest.raises(ValueError):
        reparametrized_integrate(
            body, lift_reduced_state(CHAPLYGIN_START), IntegratorConfig(dt=1e-2, t_final=1.0)
        )


# ----------------------------------------------------------- measure diagnostics


def test_divergence_defect_with_preserved_density(rank):
    body = asymmetric_body(rank)
    worst = 0.0
    for seed in range(10):
        worst = max(worst, divergence_defect(body, sample_reduced_state(seed=500 + seed)))
    assert worst <= 1e-8


@pytest.mark.parametrize("rank_c", [1, 2])
def test_divergence_defect_flags_wrong_density(rank_c):
    body = standard_body(rank_c)
    worst = 0.0
    for seed in range(10):
        worst = max(
            worst, divergence_defect(body, sample_reduced_state(seed=510 + seed), density="uniform")
        )
    assert worst > 1e-3


def test_uniform_density_is_preserved_without_conformal_factor():
    for rank in (0, 3):
        body = standard_body(rank)
        for seed in range(5):
            s = sample_reduced_state(seed=520 + seed)
            assert divergence_defect(body, s, density="uniform") <= 1e-8


def test_divergence_defect_argument_validation():
    body = standard_body(2)
    with pytest.raises(ValueError):
        divergence_defect(body, np.zeros(15))
    with pytest.raises(ValueError):
        divergence_defect(body, sample_reduced_state(seed=0), density="bogus")


# ---------------------------------------------------------------- interpolation


def test_hermite_sample_exact_at_nodes():
    body = standard_body(2)
    traj = integrate(body, CHAPLYGIN_START, IntegratorConfig(dt=1e-2, t_final=0.5))
    for idx in (0, 7, len(traj.times) - 1):
        t = float(traj.times[idx])
        assert np.max(np.abs(hermite_sample(body, traj, t) - traj.states[idx])) <= 1e-14


def test_hermite_sample_midpoint_accuracy():
    body = standard_body(2)
    coarse = integrate(body, CHAPLYGIN_START, IntegratorConfig(dt=1e-2, t_final=0.5))
    fine = integrate(body, CHAPLYGIN_START, IntegratorConfig(dt=1e-3, t_final=0.5))
    t = 0.205
    idx = int(round(t / 1e-3))
    assert np.max(np.abs(hermite_sample(body, coarse, t) - fine.states[idx])) <= 1e-8


def test_hermite_sample_rejects_out_of_range():
    body = standard_body(2)
    traj = integrate(body, CHAPLYGIN_START, IntegratorConfig(dt=1e-2, t_final=0.5))
    with pytest.raises(ValueError):
        hermite_sample(body, traj, 0.6)
