"""Closed-form dissipativity constants, synchronization metrics, and
inequality monitors evaluated along simulated trajectories.

Derived quantities, with V = sum(C1 x^2 + y^2) the weighted state sum:

    C1 = delta / (2 b)
    C2 = (b / (4 delta lam)) (delta^2/(2b) + delta/2 + 2 c^2/delta)^2
    Q  = (1 / min(C1, 1)) [1 + (m n / delta)(C2 + delta beta / b)]
    threshold = Q [1 + (delta + gamma + 2 |c - b|) / p]

Q is the squared-norm radius of the absorbing ball; the threshold is the
boundary-gap level above which the difference fields contract at rate
2 delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from .model import CnnParams, GridDims, GridState, NonlinearityCert, discrete_laplacian

if TYPE_CHECKING:
    from .integrate import Trajectory

Array = np.ndarray

#: listed violations per report are capped at this many entries
MAX_LISTED = 50


@dataclass(frozen=True)
class DissipativityConstants:
    """The four closed-form constants; see the module docstring for formulas."""

    C1: float
    C2: float
    Q: float
    threshold: float


def constants(params: CnnParams, dims: GridDims, cert: NonlinearityCert) -> DissipativityConstants:
    """Evaluate C1, C2, Q, and the synchronization threshold exactly."""
    b, c, delta, p = params.b, params.c, params.delta, params.p
    c1 = delta / (2.0 * b)
    c2 = (b / (4.0 * delta * cert.lam)) * (
        delta * delta / (2.0 * b) + delta / 2.0 + 2.0 * c * c / delta
    ) ** 2
    q = (1.0 / min(c1, 1.0)) * (
        1.0 + (dims.m * dims.n / delta) * (c2 + delta * cert.beta / b)
    )
    threshold = q * (1.0 + (delta + cert.gamma + 2.0 * abs(c - b)) / p)
    return DissipativityConstants(C1=c1, C2=c2, Q=q, threshold=threshold)


def state_norm_sq(state: GridState) -> float:
    """Squared norm sum(x^2 + y^2); zero iff the state is zero."""
    return float(np.sum(state.x * state.x) + np.sum(state.y * state.y))


def lyapunov_V(state: GridState, C1: float) -> float:
    """Weighted sum C1 sum(x^2) + sum(y^2)."""
    if not C1 > 0.0:
        raise ValueError("C1 must be positive")
    return float(C1 * np.sum(state.x * state.x) + np.sum(state.y * state.y))


def _forcing_level(params: CnnParams, dims: GridDims, cert: NonlinearityCert) -> float:
    """(m n / delta)(C2 + delta beta / b), the steady forcing term in the bound."""
    cs = constants(params, dims, cert)
    return (dims.m * dims.n / params.delta) * (cs.C2 + params.delta * cert.beta / params.b)


def transient_bound(t, V0: float, params: CnnParams, dims: GridDims,
                    cert: NonlinearityCert):
    """Upper bound for the squared norm at time t from initial weighted sum V0.

        (exp(-delta t) V0 + (m n / delta)(C2 + delta beta / b)) / min(C1, 1)

    Accepts scalar or array t. Its t -> infinity limit sits strictly below Q.
    """
    cs = constants(params, dims, cert)
    forcing = _forcing_level(params, dims, cert)
    bound = (np.exp(-params.delta * np.asarray(t, dtype=np.float64)) * V0 + forcing) / min(cs.C1, 1.0)
    return float(bound) if bound.ndim == 0 else bound


def absorbing_entry_time(rho: float, params: CnnParams) -> float:
    """Time after which the transient term of the bound has decayed below 1
    for any start with weighted sum at most rho * max(C1, 1):

        (1 / delta) * max(0, ln(rho * max(C1, 1)))
    """
    if rho < 0.0:
        raise ValueError("rho must be nonnegative")
    c1 = params.delta / (2.0 * params.b)
    z = rho * max(c1, 1.0)
    if z <= 1.0:
        return 0.0
    return math.log(z) / params.delta


@dataclass(frozen=True)
class DifferenceFields:
    """Pairwise neighbor differences with periodic wrap.

    gamma[i,k] = x[i,k] - x[i-1,k]   v[i,k] = y[i,k] - y[i-1,k]   (row pairs)
    pi[i,k]    = x[i,k] - x[i,k-1]   w[i,k] = y[i,k] - y[i,k-1]   (column pairs)

    Row 1 wraps to row m and column 1 wraps to column n, so summing gamma
    over i (or pi over k) telescopes to zero around the ring.
    """

    gamma: Array
    v: Array
    pi: Array
    w: Array


def difference_fields(state: GridState) -> DifferenceFields:
    """The four periodic-difference fields of a state."""
    x, y = state.x, state.y
    return DifferenceFields(
        gamma=x - np.roll(x, 1, axis=0),
        v=y - np.roll(y, 1, axis=0),
        pi=x - np.roll(x, 1, axis=1),
        w=y - np.roll(y, 1, axis=1),
    )


def sync_error(state: GridState) -> float:
    """Sum of squares of all four difference fields; zero iff both fields
    are uniform across cells."""
    df = difference_fields(state)
    return float(
        np.sum(df.gamma * df.gamma) + np.sum(df.v * df.v)
        + np.sum(df.pi * df.pi) + np.sum(df.w * df.w)
    )


def boundary_gap_sq(state: GridState) -> float:
    """Squared boundary gap: sum_k (x[m,k] - x[1,k])^2 + sum_i (x[i,n] - x[i,1])^2."""
    x = state.x
    row_gap = x[-1, :] - x[0, :]
    col_gap = x[:, -1] - x[:, 0]
    return float(np.sum(row_gap * row_gap) + np.sum(col_gap * col_gap))


def divergence_identity_residual(x, a: float) -> float:
    """Relative residual of the summation-by-parts identity

        sum a L(x)[i,k] x[i,k] = -a sum (x[i,k] - x[i-1,k])^2
                                 - a sum (x[i,k] - x[i,k-1])^2

    with periodic differences; both sides computed independently. Returns
    |LHS - RHS| / (1 + |RHS|).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("x must be a 2D field")
    dims = GridDims(x.shape[0], x.shape[1])
    lhs = a * float(np.sum(discrete_laplacian(x, dims) * x))
    row_diff = x - np.roll(x, 1, axis=0)
    col_diff = x - np.roll(x, 1, axis=1)
    rhs = -a * float(np.sum(row_diff * row_diff) + np.sum(col_diff * col_diff))
    return abs(lhs - rhs) / (1.0 + abs(rhs))


def threshold_fired(traj: "Trajectory", params: CnnParams, dims: GridDims,
                    cert: NonlinearityCert) -> Array:
    """Per-sample boolean: the instantaneous gap-threshold hypothesis holds.

    Fires at samples where the weighted sum sits inside the absorbing ball
    (V < Q) and the boundary-gap signal exceeds the threshold level,
    4 p G > 4 (delta + gamma + 2|c - b| + p) Q.
    """
    cs = constants(params, dims, cert)
    v = traj.scalars.lyapunov_v
    g = traj.scalars.boundary_gap_sq
    rate_sum = params.delta + cert.gamma + 2.0 * abs(params.c - params.b) + params.p
    return (v < cs.Q) & (4.0 * params.p * g > 4.0 * rate_sum * cs.Q)


@dataclass(frozen=True)
class CheckViolation:
    """One interior sample violating a monitored differential inequality."""

    index: int
    t: float
    lhs: float
    bound: float
    tol: float


@dataclass(frozen=True)
class InequalityReport:
    """Centered-difference check of dV/dt + delta V <= m n (C2 + delta beta / b).

    worst_margin is the largest lhs - bound - tol over interior samples
    (negative means the check passed with room to spare).
    """

    passed: bool
    n_checked: int
    n_violations: int
    worst_margin: float
    rhs_bound: float
    violations: tuple[CheckViolation, ...]


def _centered_lhs(times: Array, series: Array, decay: float,
                  tol_abs: float, tol_curv: float):
    """Centered-difference d(series)/dt + decay * series on interior samples,
    with the per-sample tolerance tol_abs + tol_curv h^2 |series|_local."""
    dt2 = times[2:] - times[:-2]
    deriv = (series[2:] - series[:-2]) / dt2
    mid = series[1:-1]
    h = 0.5 * dt2
    scale = np.maximum(np.maximum(np.abs(series[:-2]), np.abs(mid)), np.abs(series[2:]))
    tol = tol_abs + tol_curv * h * h * scale
    return deriv + decay * mid, tol


def lyapunov_inequality_check(traj: "Trajectory", params: CnnParams, dims: GridDims,
                              cert: NonlinearityCert, tol_abs: float = 1e-6,
                              tol_curv: float = 10.0) -> InequalityReport:
    """Check the weighted-sum differential inequality along a trajectory.

    At each interior sample, dV/dt is approximated by the centered
    difference; the inequality must hold up to a tolerance of tol_abs plus
    an O(h^2) term scaled by the local magnitude of V, which separates
    discretization noise from genuine violations.
    """
    times = traj.times
    if len(times) < 3:
        raise ValueError("need at least 3 samples for a centered-difference check")
    cs = constants(params, dims, cert)
    bound = dims.m * dims.n * (cs.C2 + params.delta * cert.beta / params.b)
    lhs, tol = _centered_lhs(times, traj.scalars.lyapunov_v, params.delta, tol_abs, tol_curv)
    margin = lhs - bound - tol
    bad = np.flatnonzero(margin > 0.0)
    violations = tuple(
        CheckViolation(int(j) + 1, float(times[j + 1]), float(lhs[j]), bound, float(tol[j]))
        for j in bad[:MAX_LISTED]
    )
    return InequalityReport(
        passed=bad.size == 0,
        n_checked=int(lhs.size),
        n_violations=int(bad.size),
        worst_margin=float(margin.max()),
        rhs_bound=bound,
        violations=violations,
    )


@dataclass(frozen=True)
class SyncDecayReport:
    """Conditional-decay check: wherever the instantaneous gap-threshold
    hypothesis fires, the sync error must obey dE/dt + 2 delta E < tol.

    n_fired counts interior samples where the hypothesis held;
    worst_lhs / worst_margin are None when it never fired.
    """

    passed: bool
    n_checked: int
    n_fired: int
    fired_fraction: float
    n_violations: int
    worst_lhs: Optional[float]
    worst_margin: Optional[float]
    violations: tuple[CheckViolation, ...]


def sync_decay_check(traj: "Trajectory", params: CnnParams, dims: GridDims,
                     cert: NonlinearityCert, tol_abs: float = 1e-6,
                     tol_curv: float = 10.0) -> SyncDecayReport:
    """Check the 2-delta decay of the sync error under the gap hypothesis.

    A finite run cannot evaluate the limit-infimum form of the threshold
    condition, so the hypothesis is tested per sample in its instantaneous
    form (absorbing-ball guard V < Q plus the gap-level inequality); the
    report records how often it fired and any conclusion violations there.
    """
    times = traj.times
    if len(times) < 3:
        raise ValueError("need at least 3 samples for a centered-difference check")
    fired = threshold_fired(traj, params, dims, cert)[1:-1]
    lhs, tol = _centered_lhs(times, traj.scalars.sync_error, 2.0 * params.delta,
                             tol_abs, tol_curv)
    margin = lhs - tol
    bad = np.flatnonzero(fired & (margin >= 0.0))
    violations = tuple(
        CheckViolation(int(j) + 1, float(times[j + 1]), float(lhs[j]), 0.0, float(tol[j]))
        for j in bad[:MAX_LISTED]
    )
    n_fired = int(np.count_nonzero(fired))
    return SyncDecayReport(
        passed=bad.size == 0,
        n_checked=int(lhs.size),
        n_fired=n_fired,
        fired_fraction=n_fired / lhs.size,
        n_violations=int(bad.size),
        worst_lhs=float(lhs[fired].max()) if n_fired else None,
        worst_margin=float(margin[fired].max()) if n_fired else None,
        violations=violations,
    )


@dataclass(frozen=True)
class RateFit:
    """Least-squares exponential decay rate of a positive series.

    rate is the negative slope of the best-fit line of ln E against t, in
    units of 1/time; window is the (first, last) time actually used.
    """

    rate: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    n_used: int


def fit_exponential_rate(times, E, floor: float = 1e-12) -> RateFit:
    """Fit ln E ~ intercept - rate * t over samples with E > floor.

    The floor keeps log arguments away from underflow and drops the
    numerical noise tail after synchronization completes. Degenerate fits
    (constant E) report rate 0 and r_squared 0 by convention.
    """
    t = np.asarray(times, dtype=np.float64)
    e = np.asarray(E, dtype=np.float64)
    if t.shape != e.shape or t.ndim != 1:
        raise ValueError("times and E must be 1D sequences of equal length")
    mask = e > floor
    n_used = int(np.count_nonzero(mask))
    if n_used < 2:
        raise ValueError(f"insufficient data: {n_used} samples above floor, need at least 2")
    tt = t[mask]
    ln_e = np.log(e[mask])
    if np.all(ln_e == ln_e[0]):  # constant series: rate 0, r^2 0 by convention
        return RateFit(rate=0.0, intercept=float(ln_e[0]), r_squared=0.0,
                       window=(float(tt[0]), float(tt[-1])), n_used=n_used)
    slope, intercept = np.polyfit(tt, ln_e, 1)
    residuals = ln_e - (slope * tt + intercept)
    ss_res = float(np.sum(residuals * residuals))
    ss_tot = float(np.sum((ln_e - ln_e.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 0.0
    return RateFit(
        rate=-float(slope) + 0.0,
        intercept=float(intercept),
        r_squared=r_squared,
        window=(float(tt[0]), float(tt[-1])),
        n_used=n_used,
    )


def fit_trajectory_rate(traj: "Trajectory", floor: float = 1e-12,
                        window_fraction: float = 0.5) -> Optional[RateFit]:
    """Rate fit of the sync error over the trailing part of a trajectory.

    The window defaults to the last half of the time span (post-transient).
    Returns None when fewer than 2 samples remain above the floor.
    """
    if not 0.0 < window_fraction <= 1.0:
        raise ValueError("window_fraction must lie in (0, 1]")
    times = traj.times
    t_cut = times[-1] - window_fraction * (times[-1] - times[0])
    sel = times >= t_cut
    try:
        return fit_exponential_rate(times[sel], traj.scalars.sync_error[sel], floor=floor)
    except ValueError:
        return None
