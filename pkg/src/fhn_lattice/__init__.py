"""2D lattice FitzHugh-Nagumo network with periodic wrap and boundary-gap
feedback: simulation, dissipativity bounds, and synchronization diagnostics.
"""

from .model import (
    CertificateReport,
    CertViolation,
    CnnParams,
    ControlField,
    GridDims,
    GridState,
    NonlinearityCert,
    assumption_constants,
    boundary_feedback,
    cubic_fhn,
    cubic_fhn_prime,
    discrete_laplacian,
    rhs,
    verify_assumption,
)
from .integrate import (
    DivergenceError,
    ScalarSeries,
    StepperConfig,
    Trajectory,
    observed_rk4_order,
    rk4_step,
    simulate,
)
from .analysis import (
    CheckViolation,
    DifferenceFields,
    DissipativityConstants,
    InequalityReport,
    RateFit,
    SyncDecayReport,
    absorbing_entry_time,
    boundary_gap_sq,
    constants,
    difference_fields,
    divergence_identity_residual,
    fit_exponential_rate,
    fit_trajectory_rate,
    lyapunov_inequality_check,
    lyapunov_V,
    state_norm_sq,
    sync_decay_check,
    sync_error,
    threshold_fired,
    transient_bound,
)

__version__ = "0.1.0"

__all__ = [
    "CertificateReport",
    "CertViolation",
    "CheckViolation",
    "CnnParams",
    "ControlField",
    "DifferenceFields",
    "DissipativityConstants",
    "DivergenceError",
    "GridDims",
    "GridState",
    "InequalityReport",
    "NonlinearityCert",
    "RateFit",
    "ScalarSeries",
    "StepperConfig",
    "SyncDecayReport",
    "Trajectory",
    "absorbing_entry_time",
    "assumption_constants",
    "boundary_feedback",
    "boundary_gap_sq",
    "constants",
    "cubic_fhn",
    "cubic_fhn_prime",
    "difference_fields",
    "discrete_laplacian",
    "divergence_identity_residual",
    "fit_exponential_rate",
    "fit_trajectory_rate",
    "lyapunov_inequality_check",
    "lyapunov_V",
    "observed_rk4_order",
    "rhs",
    "rk4_step",
    "simulate",
    "state_norm_sq",
    "sync_decay_check",
    "sync_error",
    "threshold_fired",
    "transient_bound",
    "verify_assumption",
]
