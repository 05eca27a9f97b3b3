"""Integrator tests: RK4 oracles, sampling arithmetic, determinism,
divergence handling, and agreement between the fused and step-by-step paths.
"""

import math

import numpy as np
import pytest

from fhn_lattice.analysis import boundary_gap_sq, lyapunov_V, state_norm_sq, sync_error
from fhn_lattice.integrate import (
    DivergenceError,
    StepperConfig,
    Trajectory,
    ScalarSeries,
    observed_rk4_order,
    rk4_step,
    simulate,
)
from fhn_lattice.model import CnnParams, GridDims, GridState, NonlinearityCert, cubic_fhn, cubic_fhn_prime

DIMS4 = GridDims(4, 4)
DIMS8 = GridDims(8, 8)
PARAMS1 = CnnParams(1.0, 1.0, 1.0, 1.0, 1.0)
CERT05 = NonlinearityCert.cubic(0.5)


class TestStepperConfig:
    def test_n_steps_floor(self):
        assert StepperConfig(dt=1e-3, t_end=50.0).n_steps == 50_000
        # 0.3 / 0.1 rounds below 3 in floating point; the count must still be 3
        assert StepperConfig(dt=0.1, t_end=0.3).n_steps == 3

    def test_n_samples(self):
        assert StepperConfig(dt=0.1, t_end=1.0, sample_every=2).n_samples == 6
        # trailing partial interval is dropped: 3 steps, storing every 2nd
        assert StepperConfig(dt=0.1, t_end=0.3, sample_every=2).n_samples == 2

    @pytest.mark.parametrize("kwargs", [
        dict(dt=0.0, t_end=1.0),
        dict(dt=-0.1, t_end=1.0),
        dict(dt=0.5, t_end=0.1),
        dict(dt=0.1, t_end=1.0, sample_every=0),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            StepperConfig(**kwargs)


class TestRk4Step:
    def test_equilibrium_fixed_point(self):
        state = GridState.zeros(DIMS4)
        out = rk4_step(state, 1e-2, PARAMS1, CERT05, DIMS4)
        assert np.array_equal(out.x, np.zeros((4, 4)))
        assert np.array_equal(out.y, np.zeros((4, 4)))

    def test_decoupled_recovery_matches_exponential(self):
        # c tiny enough that the recovery variable decouples to machine
        # precision while all parameters stay strictly positive
        params = CnnParams(1.0, 1.0, 1e-300, 1.0, 1.0)
        dt = 0.1
        state = GridState.uniform(DIMS4, 0.0, 1.0)
        out = rk4_step(state, dt, params, CERT05, DIMS4)
        z = -params.delta * dt
        stability_poly = 1.0 + z + z**2 / 2.0 + z**3 / 6.0 + z**4 / 24.0
        assert np.allclose(out.y, stability_poly, rtol=1e-15)
        assert np.allclose(out.y, math.exp(z), atol=1.05 * (params.delta * dt) ** 5 / 120.0)

    def test_step_halving_reduces_error_16x(self):
        initial = GridState.random(DIMS4, seed=2, amplitude=1.0)

        def end_state(dt, steps):
            state = initial
            for _ in range(steps):
                state = rk4_step(state, dt, PARAMS1, CERT05, DIMS4)
            return state

        ref = end_state(0.0025, 160)  # dt / 16
        e1 = end_state(0.04, 10)
        e2 = end_state(0.02, 20)
        err1 = np.abs(e1.x - ref.x).max()
        err2 = np.abs(e2.x - ref.x).max()
        assert err1 / err2 == pytest.approx(16.0, rel=0.25)

    def test_invalid_dt(self):
        with pytest.raises(ValueError):
            rk4_step(GridState.zeros(DIMS4), 0.0, PARAMS1, CERT05, DIMS4)

    def test_nonfinite_raises_divergence(self):
        state = GridState.uniform(DIMS4, 1e150, 0.0)  # cubic overflows immediately
        with pytest.raises(DivergenceError):
            rk4_step(state, 1.0, PARAMS1, CERT05, DIMS4)


class TestSimulate:
    def test_first_sample_is_initial(self):
        initial = GridState.random(DIMS4, seed=9, amplitude=1.0)
        traj = simulate(initial, StepperConfig(dt=0.01, t_end=0.1), PARAMS1, CERT05, DIMS4)
        assert np.array_equal(traj.states[0].x, initial.x)
        assert np.array_equal(traj.states[0].y, initial.y)

    def test_zero_initial_stays_zero(self):
        traj = simulate(GridState.zeros(DIMS4), StepperConfig(dt=0.01, t_end=0.5),
                        PARAMS1, CERT05, DIMS4)
        for state in traj.states:
            assert np.array_equal(state.x, np.zeros((4, 4)))
        assert np.all(traj.scalars.norm_sq == 0.0)

    def test_uniform_initial_stays_uniform(self):
        initial = GridState.uniform(DIMS4, 0.37, -0.21)
        traj = simulate(initial, StepperConfig(dt=0.01, t_end=1.0), PARAMS1, CERT05, DIMS4)
        for state in traj.states:
            assert np.all(state.x == state.x[0, 0])
            assert np.all(state.y == state.y[0, 0])
        assert np.all(traj.scalars.sync_error == 0.0)

    def test_times_exact_multiples(self):
        cfg = StepperConfig(dt=1e-3, t_end=1.0, sample_every=7)
        traj = simulate(GridState.zeros(DIMS4), cfg, PARAMS1, CERT05, DIMS4)
        assert len(traj) == cfg.n_samples
        for j, t in enumerate(traj.times):
            assert t == j * 7 * 1e-3

    def test_deterministic_rerun_bitwise(self):
        initial = GridState.random(DIMS8, seed=4, amplitude=1.0)
        cfg = StepperConfig(dt=1e-3, t_end=0.5, sample_every=10)
        t1 = simulate(initial, cfg, PARAMS1, CERT05, DIMS8)
        t2 = simulate(initial, cfg, PARAMS1, CERT05, DIMS8)
        for s1, s2 in zip(t1.states, t2.states):
            assert np.array_equal(s1.x, s2.x)
            assert np.array_equal(s1.y, s2.y)
        assert np.array_equal(t1.scalars.norm_sq, t2.scalars.norm_sq)

    def test_fused_and_steps_paths_identical(self):
        initial = GridState.random(DIMS4, seed=13, amplitude=1.0)
        cfg = StepperConfig(dt=1e-3, t_end=0.05, sample_every=1)
        fused = simulate(initial, cfg, PARAMS1, CERT05, DIMS4, method="fused")
        steps = simulate(initial, cfg, PARAMS1, CERT05, DIMS4, method="steps")
        for s1, s2 in zip(fused.states, steps.states):
            assert np.array_equal(s1.x, s2.x)
            assert np.array_equal(s1.y, s2.y)

    def test_steps_path_is_repeated_rk4(self):
        initial = GridState.random(DIMS4, seed=21, amplitude=0.5)
        cfg = StepperConfig(dt=0.01, t_end=0.05, sample_every=1)
        traj = simulate(initial, cfg, PARAMS1, CERT05, DIMS4, method="steps")
        state = initial
        for stored in traj.states[1:]:
            state = rk4_step(state, 0.01, PARAMS1, CERT05, DIMS4)
            assert np.array_equal(stored.x, state.x)
            assert np.array_equal(stored.y, state.y)

    def test_scalar_series_matches_analysis(self):
        initial = GridState.random(DIMS8, seed=6, amplitude=1.0)
        traj = simulate(initial, StepperConfig(dt=0.01, t_end=0.2), PARAMS1, CERT05, DIMS8)
        c1 = 0.5
        for j, state in enumerate(traj.states):
            assert traj.scalars.norm_sq[j] == state_norm_sq(state)
            assert traj.scalars.lyapunov_v[j] == lyapunov_V(state, c1)
            assert traj.scalars.sync_error[j] == sync_error(state)
            assert traj.scalars.boundary_gap_sq[j] == boundary_gap_sq(state)

    def test_custom_nonlinearity_uses_steps_path(self):
        cert = NonlinearityCert.custom(
            f=lambda s: cubic_fhn(s, 0.5), f_prime=lambda s: cubic_fhn_prime(s, 0.5),
            lam=0.5, beta=40.5, gamma=1.75)
        initial = GridState.random(DIMS4, seed=3, amplitude=0.5)
        cfg = StepperConfig(dt=0.01, t_end=0.05)
        custom = simulate(initial, cfg, PARAMS1, cert, DIMS4)
        builtin = simulate(initial, cfg, PARAMS1, CERT05, DIMS4)
        assert np.array_equal(custom.states[-1].x, builtin.states[-1].x)

    def test_fused_rejects_custom_nonlinearity(self):
        cert = NonlinearityCert.custom(f=lambda s: -s**3, f_prime=lambda s: -3 * s**2,
                                       lam=0.5, beta=1.0, gamma=1.0)
        with pytest.raises(ValueError, match="fused"):
            simulate(GridState.zeros(DIMS4), StepperConfig(dt=0.01, t_end=0.1),
                     PARAMS1, cert, DIMS4, method="fused")

    @pytest.mark.parametrize("method", ["fused", "steps"])
    def test_divergence_reports_last_finite_time(self, method):
        # an explicit step this large is violently unstable for the cubic
        initial = GridState.random(DIMS8, seed=1, amplitude=3.0)
        cfg = StepperConfig(dt=10.0, t_end=100.0, sample_every=1)
        with pytest.raises(DivergenceError) as info:
            simulate(initial, cfg, PARAMS1, CERT05, DIMS8, method=method)
        assert info.value.t_last_finite is not None
        assert info.value.t_last_finite >= 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            simulate(GridState.zeros(DIMS4), StepperConfig(dt=0.01, t_end=0.1),
                     PARAMS1, CERT05, DIMS8)

    def test_unknown_method(self):
        with pytest.raises(ValueError, match="method"):
            simulate(GridState.zeros(DIMS4), StepperConfig(dt=0.01, t_end=0.1),
                     PARAMS1, CERT05, DIMS4, method="rk45")


class TestTrajectoryValidation:
    def test_times_must_increase(self):
        zero = GridState.zeros(DIMS4)
        scalars = ScalarSeries(*(np.zeros(2),) * 4)
        with pytest.raises(ValueError, match="increasing"):
            Trajectory(times=np.array([0.0, 0.0]), states=(zero, zero), scalars=scalars)

    def test_length_mismatch(self):
        zero = GridState.zeros(DIMS4)
        scalars = ScalarSeries(*(np.zeros(2),) * 4)
        with pytest.raises(ValueError, match="equal length"):
            Trajectory(times=np.array([0.0, 1.0]), states=(zero,), scalars=scalars)


class TestObservedOrder:
    def test_order_is_four(self):
        initial = GridState.random(DIMS4, seed=8, amplitude=1.0)
        order = observed_rk4_order(initial, PARAMS1, CERT05, DIMS4, t_end=1.0, dt=0.02)
        assert order == pytest.approx(4.0, abs=0.3)
