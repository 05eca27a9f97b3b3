"""Command-line interface: constant evaluation, simulation runs, parameter
sweeps, and the verification battery.

Subcommands: ``constants``, ``simulate``, ``sweep``, ``verify``; common flags
``--config``, ``--out``, ``--jobs``, ``--seed``. Exit codes: 0 success,
1 check failure or divergence, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import importlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis
from .integrate import DivergenceError, StepperConfig, Trajectory, observed_rk4_order, simulate
from .model import CnnParams, GridDims, GridState, NonlinearityCert, verify_assumption

SCALARS_HEADER = ["t", "norm_sq", "lyapunov_v", "sync_error", "boundary_gap_sq", "threshold_fired"]
SWEEP_HEADER = ["a", "p", "status", "final_sync_error", "fitted_rate", "r_squared",
                "fired_fraction", "Q", "threshold"]
FORMATS = ("csv", "jsonl", "summary", "svg")


class ConfigError(ValueError):
    """Configuration is malformed; the message names the offending field."""


def _fmt(value: float) -> str:
    """Floating values in CSV files carry 17 significant digits."""
    return f"{value:.17g}"


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------

def _require_keys(section: dict, allowed: set, path: str):
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: expected an object")
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")


def _number(section: dict, key: str, path: str, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"{path}.{key}: missing required value")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number")
    return value


def _integer(section: dict, key: str, path: str, default=None):
    value = _number(section, key, path, default)
    if not isinstance(value, (int, np.integer)):
        raise ConfigError(f"{path}.{key}: expected an integer")
    return int(value)


@dataclass(frozen=True)
class NonlinearitySpec:
    """Configured nonlinearity: the built-in cubic or a custom import path."""

    kind: str
    alpha: Optional[float] = None
    lam: Optional[float] = None
    beta: Optional[float] = None
    gamma: Optional[float] = None
    f: Optional[str] = None
    f_prime: Optional[str] = None

    def to_cert(self) -> NonlinearityCert:
        if self.kind == "cubic":
            return NonlinearityCert.cubic(self.alpha)
        return NonlinearityCert.custom(
            f=_import_callable(self.f, "nonlinearity.f"),
            f_prime=_import_callable(self.f_prime, "nonlinearity.f_prime"),
            lam=self.lam, beta=self.beta, gamma=self.gamma,
        )

    def to_dict(self) -> dict:
        if self.kind == "cubic":
            return {"kind": "cubic", "alpha": self.alpha}
        return {"kind": "custom", "lambda": self.lam, "beta": self.beta,
                "gamma": self.gamma, "f": self.f, "f_prime": self.f_prime}


def _import_callable(spec: str, path: str):
    """Resolve a "module:attribute" reference to a callable."""
    module_name, _, attr = spec.partition(":")
    if not module_name or not attr:
        raise ConfigError(f"{path}: expected 'module:callable', got {spec!r}")
    try:
        obj = getattr(importlib.import_module(module_name), attr)
    except (ImportError, AttributeError) as err:
        raise ConfigError(f"{path}: cannot import {spec!r} ({err})") from err
    if not callable(obj):
        raise ConfigError(f"{path}: {spec!r} is not callable")
    return obj


def _parse_nonlinearity(section: dict, path: str) -> NonlinearitySpec:
    if not isinstance(section, dict) or "kind" not in section:
        raise ConfigError(f"{path}.kind: missing required value")
    kind = section["kind"]
    if kind == "cubic":
        _require_keys(section, {"kind", "alpha"}, path)
        alpha = _number(section, "alpha", path)
        if not 0.0 < alpha < 1.0:
            raise ConfigError(f"{path}.alpha: must lie in (0, 1)")
        return NonlinearitySpec(kind="cubic", alpha=float(alpha))
    if kind == "custom":
        _require_keys(section, {"kind", "lambda", "beta", "gamma", "f", "f_prime"}, path)
        for key in ("lambda", "beta", "gamma"):
            if _number(section, key, path) <= 0.0:
                raise ConfigError(f"{path}.{key}: must be positive")
        for key in ("f", "f_prime"):
            if not isinstance(section.get(key), str):
                raise ConfigError(f"{path}.{key}: expected a 'module:callable' string")
        return NonlinearitySpec(
            kind="custom", lam=float(section["lambda"]), beta=float(section["beta"]),
            gamma=float(section["gamma"]), f=section["f"], f_prime=section["f_prime"],
        )
    raise ConfigError(f"{path}.kind: expected 'cubic' or 'custom', got {kind!r}")


@dataclass(frozen=True)
class InitialSpec:
    """Initial data: a uniform value pair, seeded random entries, or a file."""

    kind: str
    x: Optional[float] = None
    y: Optional[float] = None
    seed: Optional[int] = None
    amplitude: Optional[float] = None
    path: Optional[str] = None

    def build(self, dims: GridDims) -> GridState:
        if self.kind == "uniform":
            return GridState.uniform(dims, self.x, self.y)
        if self.kind == "random":
            return GridState.random(dims, self.seed, self.amplitude)
        data = json.loads(Path(self.path).read_text())
        fields = []
        for key in ("x", "y"):
            arr = np.asarray(data[key], dtype=np.float64)
            if arr.ndim == 1:
                arr = arr.reshape(dims.shape)
            fields.append(arr)
        return GridState(*fields)

    def to_dict(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform", "x": self.x, "y": self.y}
        if self.kind == "random":
            return {"kind": "random", "seed": self.seed, "amplitude": self.amplitude}
        return {"kind": "file", "path": self.path}


def _parse_initial(section: dict, path: str) -> InitialSpec:
    if not isinstance(section, dict) or "kind" not in section:
        raise ConfigError(f"{path}.kind: missing required value")
    kind = section["kind"]
    if kind == "uniform":
        _require_keys(section, {"kind", "x", "y"}, path)
        return InitialSpec(kind="uniform", x=float(_number(section, "x", path)),
                           y=float(_number(section, "y", path)))
    if kind == "random":
        _require_keys(section, {"kind", "seed", "amplitude"}, path)
        seed = _integer(section, "seed", path)
        if not 0 <= seed < 2**64:
            raise ConfigError(f"{path}.seed: must be a 64-bit unsigned integer")
        amplitude = _number(section, "amplitude", path)
        if amplitude <= 0.0:
            raise ConfigError(f"{path}.amplitude: must be positive")
        return InitialSpec(kind="random", seed=seed, amplitude=float(amplitude))
    if kind == "file":
        _require_keys(section, {"kind", "path"}, path)
        if not isinstance(section.get("path"), str):
            raise ConfigError(f"{path}.path: expected a string")
        return InitialSpec(kind="file", path=section["path"])
    raise ConfigError(f"{path}.kind: expected 'uniform', 'random' or 'file', got {kind!r}")


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "out"
    formats: tuple[str, ...] = ("csv", "summary")


@dataclass(frozen=True)
class SweepSpec:
    a: tuple[float, ...]
    p: tuple[float, ...]


@dataclass(frozen=True)
class RunConfig:
    """Complete run description; round-trips losslessly through to_dict/parse."""

    dims: GridDims
    params: CnnParams
    nonlinearity: NonlinearitySpec
    stepper: StepperConfig
    initial: InitialSpec
    outputs: OutputSpec
    sweep: Optional[SweepSpec] = None

    def to_dict(self) -> dict:
        data = {
            "dims": {"m": self.dims.m, "n": self.dims.n,
                     "h_x": self.dims.h_x, "h_y": self.dims.h_y},
            "params": {"a": self.params.a, "b": self.params.b, "c": self.params.c,
                       "delta": self.params.delta, "p": self.params.p},
            "nonlinearity": self.nonlinearity.to_dict(),
            "stepper": {"dt": self.stepper.dt, "t_end": self.stepper.t_end,
                        "sample_every": self.stepper.sample_every},
            "initial": self.initial.to_dict(),
            "outputs": {"directory": self.outputs.directory,
                        "formats": list(self.outputs.formats)},
        }
        if self.sweep is not None:
            data["sweep"] = {"a": list(self.sweep.a), "p": list(self.sweep.p)}
        return data


def parse_config(data: dict) -> RunConfig:
    """Validate a configuration mapping; unknown keys are rejected with the
    offending field path in the error message."""
    _require_keys(data, {"dims", "params", "nonlinearity", "stepper", "initial",
                         "outputs", "sweep"}, "config")
    for section in ("dims", "params", "nonlinearity", "stepper", "initial"):
        if section not in data:
            raise ConfigError(f"config.{section}: missing required section")

    d = data["dims"]
    _require_keys(d, {"m", "n", "h_x", "h_y"}, "dims")
    try:
        dims = GridDims(m=_integer(d, "m", "dims"), n=_integer(d, "n", "dims"),
                        h_x=float(_number(d, "h_x", "dims", 1.0)),
                        h_y=float(_number(d, "h_y", "dims", 1.0)))
    except ValueError as err:
        raise ConfigError(f"dims: {err}") from err

    pr = data["params"]
    _require_keys(pr, {"a", "b", "c", "delta", "p"}, "params")
    try:
        params = CnnParams(*(float(_number(pr, key, "params"))
                             for key in ("a", "b", "c", "delta", "p")))
    except ValueError as err:
        raise ConfigError(f"params: {err}") from err

    nonlinearity = _parse_nonlinearity(data["nonlinearity"], "nonlinearity")

    st = data["stepper"]
    _require_keys(st, {"dt", "t_end", "sample_every"}, "stepper")
    try:
        stepper = StepperConfig(dt=float(_number(st, "dt", "stepper")),
                                t_end=float(_number(st, "t_end", "stepper")),
                                sample_every=_integer(st, "sample_every", "stepper", 1))
    except ValueError as err:
        raise ConfigError(f"stepper: {err}") from err

    initial = _parse_initial(data["initial"], "initial")

    outputs = OutputSpec()
    if "outputs" in data:
        ou = data["outputs"]
        _require_keys(ou, {"directory", "formats"}, "outputs")
        directory = ou.get("directory", "out")
        if not isinstance(directory, str):
            raise ConfigError("outputs.directory: expected a string")
        formats = ou.get("formats", ["csv", "summary"])
        if not isinstance(formats, list) or any(f not in FORMATS for f in formats):
            raise ConfigError(f"outputs.formats: expected a list drawn from {FORMATS}")
        outputs = OutputSpec(directory=directory, formats=tuple(formats))

    sweep = None
    if "sweep" in data:
        sw = data["sweep"]
        _require_keys(sw, {"a", "p"}, "sweep")
        grids = {}
        for key in ("a", "p"):
            values = sw.get(key)
            if not isinstance(values, list) or not values or \
                    any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in values):
                raise ConfigError(f"sweep.{key}: expected a nonempty list of numbers")
            grids[key] = tuple(float(v) for v in values)
        sweep = SweepSpec(a=grids["a"], p=grids["p"])

    return RunConfig(dims=dims, params=params, nonlinearity=nonlinearity,
                     stepper=stepper, initial=initial, outputs=outputs, sweep=sweep)


def default_config() -> RunConfig:
    """Desk-scale defaults: 8x8 grid, unit parameters, cubic alpha = 0.5,
    dt = 1e-3 over [0, 50], seeded random initial data of amplitude 1."""
    return RunConfig(
        dims=GridDims(8, 8),
        params=CnnParams(1.0, 1.0, 1.0, 1.0, 1.0),
        nonlinearity=NonlinearitySpec(kind="cubic", alpha=0.5),
        stepper=StepperConfig(dt=1e-3, t_end=50.0, sample_every=10),
        initial=InitialSpec(kind="random", seed=42, amplitude=1.0),
        outputs=OutputSpec(),
    )


def load_config(path: str) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path!r}: {err}") from err
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}") from err
    return parse_config(data)


# ----------------------------------------------------------------------
# artifacts
# ----------------------------------------------------------------------

def _write_scalars_csv(path: Path, traj: Trajectory, fired: np.ndarray):
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(SCALARS_HEADER)
        sc = traj.scalars
        for j, t in enumerate(traj.times):
            writer.writerow([
                _fmt(t), _fmt(sc.norm_sq[j]), _fmt(sc.lyapunov_v[j]),
                _fmt(sc.sync_error[j]), _fmt(sc.boundary_gap_sq[j]),
                "true" if fired[j] else "false",
            ])


def _write_states_jsonl(path: Path, traj: Trajectory):
    with path.open("w") as handle:
        for t, state in zip(traj.times, traj.states):
            record = {"t": float(t), "x": state.x.ravel().tolist(),
                      "y": state.y.ravel().tolist()}
            handle.write(json.dumps(record) + "\n")


def _write_sync_svg(path: Path, traj: Trajectory):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    # clip keeps exact zeros (uniform runs) plottable on the log axis
    ax.semilogy(traj.times, np.clip(traj.scalars.sync_error, 1e-300, None), lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel("sync error")
    ax.set_title("synchronization error")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _observed_entry_time(traj: Trajectory, q: float) -> Optional[float]:
    """First sample time after which the squared norm stays below Q."""
    above = np.flatnonzero(traj.scalars.norm_sq >= q)
    if above.size == 0:
        return float(traj.times[0])
    if above[-1] == len(traj) - 1:
        return None
    return float(traj.times[above[-1] + 1])


def build_summary(traj: Trajectory, params: CnnParams, dims: GridDims,
                  cert: NonlinearityCert) -> dict:
    """Final-state metrics, rate fit, absorbing-entry observation, and the
    two inequality-check reports."""
    cs = analysis.constants(params, dims, cert)
    sc = traj.scalars
    fit = analysis.fit_trajectory_rate(traj)
    norm0 = float(sc.norm_sq[0])
    v0 = float(sc.lyapunov_v[0])
    summary = {
        "final": {
            "t": float(traj.times[-1]),
            "norm_sq": float(sc.norm_sq[-1]),
            "lyapunov_v": float(sc.lyapunov_v[-1]),
            "sync_error": float(sc.sync_error[-1]),
            "boundary_gap_sq": float(sc.boundary_gap_sq[-1]),
        },
        "constants": asdict(cs),
        "rate_fit": asdict(fit) if fit is not None else None,
        "absorbing_entry": {
            "initial_norm_sq": norm0,
            "initial_lyapunov_v": v0,
            "predicted_entry_time": analysis.absorbing_entry_time(norm0, params),
            "observed_entry_time": _observed_entry_time(traj, cs.Q),
            "inside_at_end": bool(sc.norm_sq[-1] < cs.Q),
        },
    }
    if len(traj) >= 3:
        summary["lyapunov_check"] = asdict(analysis.lyapunov_inequality_check(traj, params, dims, cert))
        summary["sync_decay_check"] = asdict(analysis.sync_decay_check(traj, params, dims, cert))
    else:
        summary["lyapunov_check"] = None
        summary["sync_decay_check"] = None
    return summary


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_constants(config: RunConfig, out_dir: Optional[Path] = None) -> int:
    cert = config.nonlinearity.to_cert()
    cs = analysis.constants(config.params, config.dims, cert)
    payload = dict(asdict(cs), inputs=config.to_dict())
    text = json.dumps(payload, indent=2)
    print(text)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "constants.json").write_text(text + "\n")
    return 0


def cmd_simulate(config: RunConfig, out_dir: Optional[Path] = None) -> int:
    out = out_dir if out_dir is not None else Path(config.outputs.directory)
    out.mkdir(parents=True, exist_ok=True)
    cert = config.nonlinearity.to_cert()
    initial = config.initial.build(config.dims)
    try:
        traj = simulate(initial, config.stepper, config.params, cert, config.dims)
    except DivergenceError as err:
        print(json.dumps({"error": "divergence", "message": str(err),
                          "t_last_finite": err.t_last_finite}), file=sys.stderr)
        return 1
    fired = analysis.threshold_fired(traj, config.params, config.dims, cert)

    written = []
    _write_scalars_csv(out / "scalars.csv", traj, fired)
    written.append(out / "scalars.csv")
    if "jsonl" in config.outputs.formats:
        _write_states_jsonl(out / "states.jsonl", traj)
        written.append(out / "states.jsonl")
    if "summary" in config.outputs.formats:
        summary = build_summary(traj, config.params, config.dims, cert)
        summary["config"] = config.to_dict()
        (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
        written.append(out / "summary.json")
    if "svg" in config.outputs.formats:
        _write_sync_svg(out / "sync_error.svg", traj)
        written.append(out / "sync_error.svg")
    for path in written:
        print(path)
    return 0


def _sweep_cell(config_dict: dict) -> dict:
    """Run one (a, p) cell; divergence is recorded in-row, not raised."""
    config = parse_config(config_dict)
    cert = config.nonlinearity.to_cert()
    cs = analysis.constants(config.params, config.dims, cert)
    row = {"a": config.params.a, "p": config.params.p, "status": "ok",
           "final_sync_error": float("nan"), "fitted_rate": float("nan"),
           "r_squared": float("nan"), "fired_fraction": float("nan"),
           "Q": cs.Q, "threshold": cs.threshold}
    initial = config.initial.build(config.dims)
    try:
        traj = simulate(initial, config.stepper, config.params, cert, config.dims)
    except DivergenceError:
        row["status"] = "diverged"
        return row
    fired = analysis.threshold_fired(traj, config.params, config.dims, cert)
    fit = analysis.fit_trajectory_rate(traj)
    row["final_sync_error"] = float(traj.scalars.sync_error[-1])
    row["fired_fraction"] = float(np.mean(fired))
    if fit is not None:
        row["fitted_rate"] = fit.rate
        row["r_squared"] = fit.r_squared
    return row


def cmd_sweep(config: RunConfig, out_dir: Optional[Path] = None, jobs: int = 1) -> int:
    if config.sweep is None:
        raise ConfigError("sweep: missing required section for the sweep command")
    out = out_dir if out_dir is not None else Path(config.outputs.directory)
    out.mkdir(parents=True, exist_ok=True)

    cell_dicts = []
    for a in config.sweep.a:
        for p in config.sweep.p:
            cell = replace(config, params=replace(config.params, a=a, p=p), sweep=None)
            cell_dicts.append(cell.to_dict())

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_cell, cell_dicts))
    else:
        rows = [_sweep_cell(d) for d in cell_dicts]

    path = out / "sweep.csv"
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            writer.writerow([
                _fmt(row["a"]), _fmt(row["p"]), row["status"],
                _fmt(row["final_sync_error"]), _fmt(row["fitted_rate"]),
                _fmt(row["r_squared"]), _fmt(row["fired_fraction"]),
                _fmt(row["Q"]), _fmt(row["threshold"]),
            ])
    print(path)
    return 0


def _verification_checks(config: RunConfig) -> list[dict]:
    cert = config.nonlinearity.to_cert()
    params, dims = config.params, config.dims
    seed = config.initial.seed if config.initial.seed is not None else 42
    checks = []

    # summation-by-parts identity on random fields
    rng = np.random.default_rng(seed)
    worst = 0.0
    for size in (4, 8, 16, 32):
        for _ in range(50):
            field = rng.uniform(-2.0, 2.0, (size, size))
            for a in (0.1, 1.0, 10.0):
                worst = max(worst, analysis.divergence_identity_residual(field, a))
    checks.append({"name": "divergence_identity", "passed": worst <= 1e-10,
                   "status": "ok" if worst <= 1e-10 else "failed",
                   "worst_residual": worst, "bound": 1e-10})

    # nonlinearity certificate sampling
    report = verify_assumption(cert, -50.0, 50.0, 1_000_001)
    checks.append({"name": "assumption", "passed": report.passed,
                   "status": "ok" if report.passed else "failed",
                   "n_quartic_violations": report.n_quartic_violations,
                   "n_derivative_violations": report.n_derivative_violations,
                   "worst_quartic_margin": report.worst_quartic_margin,
                   "worst_derivative_margin": report.worst_derivative_margin})

    # integrator convergence order
    initial4 = GridState.random(GridDims(4, 4), seed=seed, amplitude=0.5)
    order = observed_rk4_order(initial4, params, cert, GridDims(4, 4))
    checks.append({"name": "rk4_order", "passed": abs(order - 4.0) <= 0.3,
                   "status": "ok" if abs(order - 4.0) <= 0.3 else "failed",
                   "observed_order": order, "expected": 4.0, "tolerance": 0.3})

    # inequality monitors on a short run; keep at least 3 stored samples
    dt = config.stepper.dt
    t_end = max(min(config.stepper.t_end, 5.0), 3.0 * dt)
    stepper = StepperConfig(dt=dt, t_end=t_end, sample_every=config.stepper.sample_every)
    if stepper.n_samples < 3:
        stepper = StepperConfig(dt=dt, t_end=t_end, sample_every=1)
    initial = config.initial.build(dims)
    try:
        traj = simulate(initial, stepper, params, cert, dims)
    except DivergenceError as err:
        for name in ("lyapunov_inequality", "sync_decay"):
            checks.append({"name": name, "passed": False, "status": "diverged",
                           "t_last_finite": err.t_last_finite, "message": str(err)})
        return checks
    lyap = analysis.lyapunov_inequality_check(traj, params, dims, cert)
    checks.append({"name": "lyapunov_inequality", "passed": lyap.passed,
                   "status": "ok" if lyap.passed else "failed",
                   "n_checked": lyap.n_checked, "n_violations": lyap.n_violations,
                   "worst_margin": lyap.worst_margin, "rhs_bound": lyap.rhs_bound})
    sync = analysis.sync_decay_check(traj, params, dims, cert)
    checks.append({"name": "sync_decay", "passed": sync.passed,
                   "status": "ok" if sync.passed else "failed",
                   "n_checked": sync.n_checked, "n_fired": sync.n_fired,
                   "fired_fraction": sync.fired_fraction,
                   "n_violations": sync.n_violations, "worst_lhs": sync.worst_lhs})
    return checks


def cmd_verify(config: RunConfig, out_dir: Optional[Path] = None) -> int:
    checks = _verification_checks(config)
    payload = {"passed": all(c["passed"] for c in checks), "checks": checks}
    text = json.dumps(payload, indent=2)
    print(text)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "verify.json").write_text(text + "\n")
    return 0 if payload["passed"] else 1


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fhn-lattice",
        description="2D lattice FitzHugh-Nagumo network: simulation, "
                    "dissipativity bounds, and synchronization diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "constants": "evaluate C1, C2, Q, and the synchronization threshold",
        "simulate": "run one simulation and write trajectory artifacts",
        "sweep": "run a grid of (a, p) cells and aggregate one CSV row each",
        "verify": "run the verification battery and report pass/fail",
    }
    for name, desc in descriptions.items():
        p = sub.add_parser(name, help=desc, description=desc)
        p.add_argument("--config", metavar="PATH", help="JSON run configuration (defaults apply when omitted)")
        p.add_argument("--out", metavar="DIR", help="output directory (overrides outputs.directory)")
        p.add_argument("--jobs", metavar="N", type=int, default=1,
                       help="concurrent sweep cells (sweep only)")
        p.add_argument("--seed", metavar="U64", type=int,
                       help="override the random-initial seed")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config else default_config()
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed: must be a 64-bit unsigned integer")
            if config.initial.kind == "random":
                config = replace(config, initial=replace(config.initial, seed=args.seed))
            else:
                print("warning: --seed ignored for non-random initial data", file=sys.stderr)
        if args.jobs < 1:
            raise ConfigError("--jobs: must be at least 1")
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2

    out_dir = Path(args.out) if args.out else None
    try:
        if args.command == "constants":
            return cmd_constants(config, out_dir)
        if args.command == "simulate":
            return cmd_simulate(config, out_dir)
        if args.command == "sweep":
            return cmd_sweep(config, out_dir, jobs=args.jobs)
        return cmd_verify(config, out_dir)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
