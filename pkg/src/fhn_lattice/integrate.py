"""Fixed-step classical RK4 integration of the lattice network.

``simulate`` drives the system with a fused numba kernel when the
nonlinearity is the built-in cubic, and falls back to repeated
:func:`rk4_step` calls otherwise. Both paths evaluate the same expressions
in the same order and produce identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import CnnParams, GridDims, GridState, NonlinearityCert, _rhs_arrays

try:
    from . import _kernels
except ImportError:  # numba unavailable; the slow path still works
    _kernels = None

Array = np.ndarray


class DivergenceError(RuntimeError):
    """A state or step produced non-finite values.

    ``t_last_finite`` is the time of the last stored all-finite sample, or
    None when the failing call carries no absolute time.
    """

    def __init__(self, message: str, t_last_finite: Optional[float] = None):
        super().__init__(message)
        self.t_last_finite = t_last_finite


@dataclass(frozen=True)
class StepperConfig:
    """Fixed-step integration plan.

    The run takes floor(t_end / dt) steps and stores every
    ``sample_every``-th state, always including t = 0; trailing steps that
    do not complete a sampling interval are not taken. Stored times are
    exact multiples of dt computed from integer step counts, never by
    accumulation.
    """

    dt: float
    t_end: float
    sample_every: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError("dt must be a positive finite number")
        if not (np.isfinite(self.t_end) and self.t_end >= self.dt):
            raise ValueError("t_end must be at least dt")
        if not isinstance(self.sample_every, (int, np.integer)) or self.sample_every < 1:
            raise ValueError("sample_every must be an integer >= 1")

    @property
    def n_steps(self) -> int:
        # small slack so t_end/dt values like 0.3/0.1 floor to the intended count
        return int(math.floor(self.t_end / self.dt + 1e-9))

    @property
    def n_samples(self) -> int:
        return self.n_steps // self.sample_every + 1


@dataclass(frozen=True)
class ScalarSeries:
    """Per-sample derived scalars: squared norm, weighted (Lyapunov) sum,
    synchronization error, and boundary gap."""

    norm_sq: Array
    lyapunov_v: Array
    sync_error: Array
    boundary_gap_sq: Array


@dataclass(frozen=True)
class Trajectory:
    """Time-sampled solution: strictly increasing times, aligned states,
    and the derived scalar series. All stored values are finite."""

    times: Array
    states: tuple[GridState, ...]
    scalars: ScalarSeries

    def __post_init__(self):
        times = np.array(self.times, dtype=np.float64, copy=True)
        times.setflags(write=False)
        if times.ndim != 1 or len(times) == 0:
            raise ValueError("times must be a nonempty 1D sequence")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("times must be strictly increasing")
        if len(self.states) != len(times):
            raise ValueError("states and times must have equal length")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", tuple(self.states))

    def __len__(self) -> int:
        return len(self.times)


def rk4_step(state: GridState, dt: float, params: CnnParams, cert: NonlinearityCert,
             dims: GridDims) -> GridState:
    """One classical 4-stage Runge-Kutta step; deterministic given inputs."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    if state.shape != dims.shape:
        raise ValueError(f"state has shape {state.shape}, expected {dims.shape}")
    x, y = state.x, state.y
    with np.errstate(over="ignore", invalid="ignore"):  # blow-up becomes DivergenceError
        k1x, k1y = _rhs_arrays(x, y, params, cert, dims)
        k2x, k2y = _rhs_arrays(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y, params, cert, dims)
        k3x, k3y = _rhs_arrays(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y, params, cert, dims)
        k4x, k4y = _rhs_arrays(x + dt * k3x, y + dt * k3y, params, cert, dims)
        nx = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        ny = y + (dt / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    if not (np.isfinite(nx).all() and np.isfinite(ny).all()):
        raise DivergenceError("RK4 step produced non-finite values")
    return GridState(nx, ny)


def _scalar_series(xs: Array, ys: Array, c1: float) -> ScalarSeries:
    """Vectorized derived scalars over stacked samples of shape (S, m, n).

    Matches the per-state definitions in ``analysis`` operation for
    operation (same roll directions, same summation order).
    """
    sq_x = (xs * xs).sum(axis=(1, 2))
    sq_y = (ys * ys).sum(axis=(1, 2))
    gamma = xs - np.roll(xs, 1, axis=1)
    v = ys - np.roll(ys, 1, axis=1)
    pi = xs - np.roll(xs, 1, axis=2)
    w = ys - np.roll(ys, 1, axis=2)
    sync = (gamma * gamma).sum(axis=(1, 2)) + (v * v).sum(axis=(1, 2)) \
        + (pi * pi).sum(axis=(1, 2)) + (w * w).sum(axis=(1, 2))
    row_gap = xs[:, -1, :] - xs[:, 0, :]
    col_gap = xs[:, :, -1] - xs[:, :, 0]
    gap = (row_gap * row_gap).sum(axis=1) + (col_gap * col_gap).sum(axis=1)
    return ScalarSeries(
        norm_sq=sq_x + sq_y,
        lyapunov_v=c1 * sq_x + sq_y,
        sync_error=sync,
        boundary_gap_sq=gap,
    )


def simulate(initial: GridState, cfg: StepperConfig, params: CnnParams,
             cert: NonlinearityCert, dims: GridDims, method: str = "auto") -> Trajectory:
    """Integrate from ``initial`` and record sampled states with scalar series.

    method selects the integration path: "fused" runs the numba kernel
    (cubic nonlinearity only), "steps" repeats :func:`rk4_step`, and "auto"
    prefers the kernel whenever it applies. Any non-finite sample aborts
    with :class:`DivergenceError` carrying the last finite sample time.
    """
    if initial.shape != dims.shape:
        raise ValueError(f"initial state has shape {initial.shape}, expected {dims.shape}")
    if method not in ("auto", "fused", "steps"):
        raise ValueError(f"unknown method {method!r}")
    fused = method == "fused" or (method == "auto" and cert.kind == "cubic" and _kernels is not None)
    if fused and cert.kind != "cubic":
        raise ValueError("the fused path supports only the built-in cubic nonlinearity")
    if fused and _kernels is None:
        raise RuntimeError("numba is required for the fused path")

    n_samples = cfg.n_samples
    se = cfg.sample_every
    m, n = dims.shape
    xs = np.empty((n_samples, m, n))
    ys = np.empty((n_samples, m, n))
    xs[0] = initial.x
    ys[0] = initial.y

    if fused:
        x = initial.x.copy()
        y = initial.y.copy()
        for j in range(1, n_samples):
            _kernels.advance_cubic(x, y, se, cfg.dt, params.a, params.b, params.c,
                                   params.delta, params.p, cert.alpha)
            if not (np.isfinite(x).all() and np.isfinite(y).all()):
                t_last = (j - 1) * se * cfg.dt
                raise DivergenceError(
                    f"non-finite state at t = {j * se * cfg.dt}; last finite sample at t = {t_last}",
                    t_last_finite=t_last,
                )
            xs[j] = x
            ys[j] = y
    else:
        state = initial
        for j in range(1, n_samples):
            for _ in range(se):
                try:
                    state = rk4_step(state, cfg.dt, params, cert, dims)
                except DivergenceError as err:
                    t_last = (j - 1) * se * cfg.dt
                    raise DivergenceError(
                        f"non-finite state before t = {j * se * cfg.dt}; "
                        f"last finite sample at t = {t_last}",
                        t_last_finite=t_last,
                    ) from err
            xs[j] = state.x
            ys[j] = state.y

    times = np.arange(n_samples) * se * cfg.dt
    c1 = params.delta / (2.0 * params.b)
    scalars = _scalar_series(xs, ys, c1)
    states = tuple(GridState(xs[j], ys[j]) for j in range(n_samples))
    return Trajectory(times=times, states=states, scalars=scalars)


def observed_rk4_order(initial: GridState, params: CnnParams, cert: NonlinearityCert,
                       dims: GridDims, t_end: float = 1.0, dt: float = 0.02) -> float:
    """Empirical convergence order from a step-halving study.

    Integrates to t_end with steps dt and dt/2 and measures both end-state
    errors against a dt/16 reference; returns log2 of their ratio, which is
    4.0 for the classical RK4 scheme up to higher-order terms.
    """

    def end_state(step):
        cfg = StepperConfig(dt=step, t_end=t_end, sample_every=max(1, round(t_end / step)))
        traj = simulate(initial, cfg, params, cert, dims)
        return traj.states[-1]

    ref = end_state(dt / 16.0)
    coarse = end_state(dt)
    half = end_state(dt / 2.0)

    def dist(s1, s2):
        return math.sqrt(float(((s1.x - s2.x) ** 2).sum() + ((s1.y - s2.y) ** 2).sum()))

    e_coarse = dist(coarse, ref)
    e_half = dist(half, ref)
    if e_half == 0.0 or e_coarse == 0.0:
        raise ValueError("step-halving errors vanished; run is too smooth or too short")
    return math.log2(e_coarse / e_half)
