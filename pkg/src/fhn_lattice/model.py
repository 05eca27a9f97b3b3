"""Lattice geometry, cell parameters, nonlinearity, and the coupled-cell
right-hand side of the 2D FitzHugh-Nagumo network with boundary-gap feedback.

Cells sit on an m x n grid with periodic wrap in both directions. Logical
indices (i, k) are 1-based with i the row and k the column; arrays store the
cell (i, k) at ``[i - 1, k - 1]`` in row-major order. All periodic index
arithmetic is realized through ``np.roll``, so ``np.roll(x, 1, axis=0)`` holds
the row-above neighbor x[i-1, k] with wrap, and so on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Callable, Optional

import numpy as np

Array = np.ndarray


def _frozen_array(values, shape=None) -> Array:
    """Own a float64 C-order copy and mark it read-only."""
    arr = np.array(values, dtype=np.float64, order="C", copy=True)
    if shape is not None and arr.shape != shape:
        raise ValueError(f"field has shape {arr.shape}, expected {shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GridDims:
    """Lattice shape: m rows by n columns of cells, both at least 4.

    The spacings h_x, h_y locate the cells in physical space but are pure
    metadata: the lattice equations carry no 1/h^2 scaling, so the spacings
    never enter any computation.
    """

    m: int
    n: int
    h_x: float = 1.0
    h_y: float = 1.0

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or not isinstance(self.n, (int, np.integer)):
            raise ValueError("m and n must be integers")
        if self.m < 4 or self.n < 4:
            raise ValueError("m, n must be >= 4")
        if not (self.h_x > 0.0 and self.h_y > 0.0):
            raise ValueError("h_x, h_y must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.m), int(self.n))

    @property
    def cells(self) -> int:
        return int(self.m) * int(self.n)


@dataclass(frozen=True)
class CnnParams:
    """Structural parameters of the network, all strictly positive.

    a      coupling strength of the 4-neighbor synaptic law
    b      recovery feedback into the excitation variable
    c      excitation drive into the recovery variable
    delta  recovery decay rate
    p      gain of the boundary-gap feedback signal
    """

    a: float
    b: float
    c: float
    delta: float
    p: float

    def __post_init__(self):
        for name in ("a", "b", "c", "delta", "p"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be a positive finite number")


def cubic_fhn(s, alpha):
    """Classic cubic excitation nonlinearity s (s - alpha) (1 - s).

    Total function of s; accepts scalars or arrays. Roots at 0, alpha, 1.
    """
    return s * (s - alpha) * (1.0 - s)


def cubic_fhn_prime(s, alpha):
    """Exact derivative of :func:`cubic_fhn`: -alpha + 2 (alpha + 1) s - 3 s^2."""
    return -alpha + 2.0 * (alpha + 1.0) * s - 3.0 * s * s


def assumption_constants(alpha: float) -> tuple[float, float, float]:
    """Coercivity certificate (lambda, beta, gamma) for the cubic with 0 < alpha < 1.

    The cubic satisfies f(s) s <= -lambda s^4 + beta and f'(s) <= gamma with

        lambda = 1/2,  beta = 8 (alpha + 1)^4,  gamma = 1 + alpha + alpha^2.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return 0.5, 8.0 * (alpha + 1.0) ** 4, 1.0 + alpha + alpha * alpha


@dataclass(frozen=True)
class NonlinearityCert:
    """A scalar nonlinearity f together with its certificate (lam, beta, gamma).

    The certificate asserts f(s) s <= -lam s^4 + beta and f'(s) <= gamma for
    all real s. The library never derives certificates; it only spot-checks
    them by sampling (:func:`verify_assumption`). Custom f and f_prime must
    accept scalars and numpy arrays elementwise.
    """

    lam: float
    beta: float
    gamma: float
    f: Callable
    f_prime: Callable
    kind: str = "custom"  # "cubic" selects the fused integrator fast path
    alpha: Optional[float] = None

    def __post_init__(self):
        if not (self.lam > 0.0 and self.beta > 0.0 and self.gamma > 0.0):
            raise ValueError("lam, beta, gamma must be positive")
        if self.kind not in ("cubic", "custom"):
            raise ValueError(f"unknown nonlinearity kind {self.kind!r}")
        if self.kind == "cubic":
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError("cubic nonlinearity requires alpha in (0, 1)")

    @classmethod
    def cubic(cls, alpha: float) -> "NonlinearityCert":
        """Built-in cubic with the exact certificate from :func:`assumption_constants`."""
        lam, beta, gamma = assumption_constants(alpha)
        return cls(
            lam=lam,
            beta=beta,
            gamma=gamma,
            f=partial(cubic_fhn, alpha=alpha),
            f_prime=partial(cubic_fhn_prime, alpha=alpha),
            kind="cubic",
            alpha=alpha,
        )

    @classmethod
    def custom(cls, f, f_prime, lam, beta, gamma) -> "NonlinearityCert":
        """Wrap a user-supplied nonlinearity with an explicitly stated certificate."""
        return cls(lam=lam, beta=beta, gamma=gamma, f=f, f_prime=f_prime, kind="custom")


@dataclass(frozen=True)
class GridState:
    """Paired fields (x, y) over the lattice: excitation and recovery per cell.

    Arrays are copied on construction, validated finite, and frozen
    read-only, so states are safe to share between threads or processes.
    """

    x: Array
    y: Array

    def __post_init__(self):
        x = _frozen_array(self.x)
        y = _frozen_array(self.y)
        if x.ndim != 2 or x.shape != y.shape:
            raise ValueError("x and y must be 2D arrays of identical shape")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("state entries must all be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def shape(self) -> tuple[int, int]:
        return self.x.shape

    @classmethod
    def zeros(cls, dims: GridDims) -> "GridState":
        return cls(np.zeros(dims.shape), np.zeros(dims.shape))

    @classmethod
    def uniform(cls, dims: GridDims, x_value: float, y_value: float) -> "GridState":
        return cls(np.full(dims.shape, float(x_value)), np.full(dims.shape, float(y_value)))

    @classmethod
    def random(cls, dims: GridDims, seed: int, amplitude: float) -> "GridState":
        """Entries i.i.d. uniform on [-amplitude, amplitude]; x drawn before y."""
        if amplitude <= 0.0:
            raise ValueError("amplitude must be positive")
        rng = np.random.default_rng(seed)
        x = rng.uniform(-amplitude, amplitude, dims.shape)
        y = rng.uniform(-amplitude, amplitude, dims.shape)
        return cls(x, y)


@dataclass(frozen=True)
class ControlField:
    """Per-cell feedback signal; nonzero only on boundary rows and columns."""

    u: Array

    def __post_init__(self):
        object.__setattr__(self, "u", _frozen_array(self.u))


def _check_field(x, dims: GridDims) -> Array:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != dims.shape:
        raise ValueError(f"field has shape {x.shape}, expected {dims.shape}")
    return x


def discrete_laplacian(x, dims: GridDims) -> Array:
    """4-neighbor stencil sum minus 4x with periodic wrap in both directions.

    L[i, k] = x[i-1, k] + x[i+1, k] + x[i, k-1] + x[i, k+1] - 4 x[i, k],
    indices wrapping modulo the grid. The coupling constant a is NOT applied
    here; callers scale by a.
    """
    x = _check_field(x, dims)
    return (
        np.roll(x, 1, axis=0)
        + np.roll(x, -1, axis=0)
        + np.roll(x, 1, axis=1)
        + np.roll(x, -1, axis=1)
        - 4.0 * x
    )


def boundary_feedback(x, dims: GridDims) -> ControlField:
    """Feedback injected at boundary cells, driven by opposite-boundary gaps.

    Row part: +(x[m, k] - x[1, k]) on row 1 and the negative on row m.
    Column part: +(x[i, n] - x[i, 1]) on column 1 and the negative on
    column n. Corner cells belong to one boundary row and one boundary
    column and receive the SUM of both parts. Interior cells get zero.
    """
    x = _check_field(x, dims)
    u = np.zeros(dims.shape)
    row_gap = x[-1, :] - x[0, :]
    col_gap = x[:, -1] - x[:, 0]
    u[0, :] += row_gap
    u[-1, :] -= row_gap
    u[:, 0] += col_gap
    u[:, -1] -= col_gap
    return ControlField(u)


def _rhs_arrays(x: Array, y: Array, params: CnnParams, cert: NonlinearityCert,
                dims: GridDims) -> tuple[Array, Array]:
    """Raw-array time derivative; no validation beyond field shapes."""
    lap = discrete_laplacian(x, dims)
    u = boundary_feedback(x, dims).u
    dx = params.a * lap + cert.f(x) - params.b * y + params.p * u
    dy = params.c * x - params.delta * y
    return dx, dy


def rhs(state: GridState, params: CnnParams, cert: NonlinearityCert,
        dims: GridDims) -> GridState:
    """Time derivative of the full network state.

    dx[i,k] = a L(x)[i,k] + f(x[i,k]) - b y[i,k] + p u(x)[i,k]
    dy[i,k] = c x[i,k] - delta y[i,k]

    with L the periodic discrete Laplacian and u the boundary feedback.
    Returned in a GridState-shaped container.
    """
    if state.shape != dims.shape:
        raise ValueError(f"state has shape {state.shape}, expected {dims.shape}")
    dx, dy = _rhs_arrays(state.x, state.y, params, cert, dims)
    return GridState(dx, dy)


@dataclass(frozen=True)
class CertViolation:
    """One sampled point violating a certificate inequality."""

    s: float
    inequality: str  # "quartic" (f(s) s <= -lam s^4 + beta) or "derivative" (f'(s) <= gamma)
    margin: float  # positive amount by which the bound is exceeded


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of sampling both certificate inequalities on a uniform grid.

    Margins are the largest observed excess over each bound (negative when
    the bound holds everywhere on the sample). ``violations`` stores at most
    ``max_listed`` offending points; the counts cover the full scan.
    """

    passed: bool
    count: int
    sample_min: float
    sample_max: float
    n_quartic_violations: int
    n_derivative_violations: int
    worst_quartic_margin: float
    worst_derivative_margin: float
    violations: tuple[CertViolation, ...]
    max_listed: int = 100


def verify_assumption(cert: NonlinearityCert, sample_min: float, sample_max: float,
                      count: int, max_listed: int = 100) -> CertificateReport:
    """Spot-check both certificate inequalities at evenly spaced points.

    A failed certificate is a report outcome, not an error. Violations beyond
    ``max_listed`` are counted but not listed individually.
    """
    if not sample_min < sample_max:
        raise ValueError("sample_min must be strictly less than sample_max")
    if count < 2:
        raise ValueError("count must be at least 2")
    s = np.linspace(sample_min, sample_max, count)
    fs = np.asarray(cert.f(s), dtype=np.float64)
    fps = np.asarray(cert.f_prime(s), dtype=np.float64)
    quartic_excess = fs * s + cert.lam * s**4 - cert.beta
    deriv_excess = fps - cert.gamma

    violations = []
    for excess, name in ((quartic_excess, "quartic"), (deriv_excess, "derivative")):
        idx = np.flatnonzero(excess > 0.0)
        for j in idx[: max(0, max_listed - len(violations))]:
            violations.append(CertViolation(float(s[j]), name, float(excess[j])))
    n_quartic = int(np.count_nonzero(quartic_excess > 0.0))
    n_deriv = int(np.count_nonzero(deriv_excess > 0.0))
    return CertificateReport(
        passed=(n_quartic + n_deriv == 0),
        count=count,
        sample_min=float(sample_min),
        sample_max=float(sample_max),
        n_quartic_violations=n_quartic,
        n_derivative_violations=n_deriv,
        worst_quartic_margin=float(quartic_excess.max()),
        worst_derivative_margin=float(deriv_excess.max()),
        violations=tuple(violations),
        max_listed=max_listed,
    )
