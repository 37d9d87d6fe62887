"""Command-line runner.

Each subcommand runs one scenario from a small JSON config and writes
deterministic artifacts (CSV tables, JSON reports) plus a summary.json
recording every gated check. The process exits 0 only if all checks of
the scenario passed, so runs can gate pipelines directly.

Config files are flat JSON objects. Keys are validated strictly: unknown
or duplicate keys, wrong types, and non-finite numbers are rejected
rather than ignored.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import run_all
from .fields import LoopParams, TwoQubitParams, experimental_params, tqd_field_magnitude
from .gates import (
    SingleGateSpec,
    closed_form_echo_gate,
    synthesize_single_gate,
    synthesize_two_qubit_gate,
    verify_exp_equivalence,
)
from .phases import (
    echo_phase_decomposition,
    evolve_eigenstate,
    loop_phase_decomposition,
    tracking_fidelity,
)
from .propagate import StepPolicy, trajectory_to_csv
from .qcore import gate_distance
from .schedule import (
    build_echo_sequence,
    field_timeline,
    single_loop_schedule,
)

__all__ = ["main"]


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

class ConfigError(Exception):
    pass


def _no_duplicates(pairs):
    seen = set()
    for key, _ in pairs:
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} in config")
        seen.add(key)
    return dict(pairs)


_FLOAT = "float"
_INT = "int"
_BOOL = "bool"
_FLOATLIST = "float-list"

# kind -> {key: (type, default-or-REQUIRED)}
_REQUIRED = object()
_SCHEMAS = {
    "fields": {
        "theta": (_FLOAT, _REQUIRED),
        "omega": (_FLOAT, _REQUIRED),
        "omega0": (_FLOAT, _REQUIRED),
        "samples": (_INT, 256),
    },
    "evolve": {
        "theta": (_FLOAT, _REQUIRED),
        "omega": (_FLOAT, _REQUIRED),
        "omega0": (_FLOAT, _REQUIRED),
        "label": (_INT, 0),
        "corrected": (_BOOL, True),
        "substeps": (_INT, 8192),
        "samples": (_INT, 256),
    },
    "echo": {
        "theta": (_FLOAT, _REQUIRED),
        "omega": (_FLOAT, _REQUIRED),
        "omega0": (_FLOAT, _REQUIRED),
        "omega_pi": (_FLOAT, None),
        "label": (_INT, 0),
        "substeps": (_INT, 8192),
        "samples": (_INT, 256),
    },
    "gate": {
        "axis_angle": (_FLOAT, _REQUIRED),
        "gate_angle": (_FLOAT, _REQUIRED),
        "omega": (_FLOAT, 1.0),
        "omega0": (_FLOAT, 1.0),
        "omega_pi": (_FLOAT, None),
        "substeps": (_INT, 8192),
    },
    "twoqubit": {
        "omega_i": (_FLOAT, _REQUIRED),
        "coupling": (_FLOAT, _REQUIRED),
        "omega": (_FLOAT, _REQUIRED),
        "omega_pi": (_FLOAT, None),
        "substeps": (_INT, 8192),
    },
    "expmap": {
        "omega_i": (_FLOAT, _REQUIRED),
        "coupling": (_FLOAT, _REQUIRED),
        "omega": (_FLOAT, _REQUIRED),
        "substeps": (_INT, 8192),
        "draws": (_INT, 100),
    },
    "scan": {
        "theta": (_FLOAT, _REQUIRED),
        "omega0": (_FLOAT, _REQUIRED),
        "ratios": (_FLOATLIST, _REQUIRED),
        "label": (_INT, 0),
        "substeps": (_INT, 4096),
        "workers": (_INT, 4),
    },
}


def _coerce(kind_name: str, key: str, typ: str, value):
    if typ == _BOOL:
        if not isinstance(value, bool):
            raise ConfigError(f"{kind_name}.{key} must be a boolean")
        return value
    if typ == _INT:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{kind_name}.{key} must be an integer")
        return value
    if typ == _FLOAT:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{kind_name}.{key} must be a number")
        value = float(value)
        if not np.isfinite(value):
            raise ConfigError(f"{kind_name}.{key} must be finite")
        return value
    if typ == _FLOATLIST:
        if not isinstance(value, list) or not value:
            raise ConfigError(f"{kind_name}.{key} must be a non-empty list of numbers")
        out = []
        for v in value:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
                raise ConfigError(f"{kind_name}.{key} must contain finite numbers")
            out.append(float(v))
        return out
    raise AssertionError(typ)


def load_config(path: str, kind: str) -> dict:
    """Read and validate a scenario config against its schema."""
    schema = _SCHEMAS[kind]
    try:
        with open(path) as fh:
            raw = json.load(fh, object_pairs_hook=_no_duplicates)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    stated = raw.pop("kind", kind)
    if stated != kind:
        raise ConfigError(f"config kind {stated!r} does not match subcommand {kind!r}")
    unknown = set(raw) - set(schema)
    if unknown:
        raise ConfigError(
            f"unknown keys {sorted(unknown)} for {kind!r}; allowed: {sorted(schema)}"
        )
    out = {}
    for key, (typ, default) in schema.items():
        if key in raw:
            out[key] = _coerce(kind, key, typ, raw[key])
        elif default is _REQUIRED:
            raise ConfigError(f"missing required key {key!r} for {kind!r}")
        else:
            out[key] = default
    return out


def _policy(params: dict, args) -> StepPolicy:
    if getattr(args, "tol", None) is not None:
        return StepPolicy(target_error=args.tol)
    n = getattr(args, "substeps", None)
    if n is None:
        n = params.get("substeps", 8192)
    return StepPolicy(substeps=n)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _matrix(u: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in u]


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


class Run:
    """Collects checks and artifacts for one scenario invocation."""

    def __init__(self, kind: str, params: dict, policy: StepPolicy, out: Path):
        self.kind = kind
        self.params = params
        self.policy = policy
        self.out = out
        self.checks = []
        self.notes = {}
        self.artifacts = []
        out.mkdir(parents=True, exist_ok=True)

    def check(self, name: str, value: float, bound: float) -> None:
        self.checks.append(
            {"name": name, "value": float(value), "bound": float(bound),
             "passed": bool(value <= bound)}
        )

    def artifact(self, name: str) -> Path:
        self.artifacts.append(name)
        return self.out / name

    @property
    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def finish(self) -> int:
        pol = (
            {"substeps": self.policy.substeps}
            if self.policy.substeps is not None
            else {"target_error": self.policy.target_error}
        )
        summary = {
            "kind": self.kind,
            "params": self.params,
            "policy": pol,
            "checks": self.checks,
            "notes": self.notes,
            "artifacts": sorted(self.artifacts),
            "all_passed": self.all_passed,
        }
        _write_json(self.out / "summary.json", summary)
        for c in self.checks:
            flag = "ok  " if c["passed"] else "FAIL"
            print(f"  {flag} {c['name']}: {c['value']:.3e} (bound {c['bound']:.0e})")
        for name in sorted(self.artifacts + ["summary.json"]):
            print(f"  wrote {self.out / name}")
        print("OK" if self.all_passed else "CHECKS FAILED")
        return 0 if self.all_passed else 1


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

def _run_fields(params: dict, policy: StepPolicy, out: Path) -> int:
    run = Run("fields", params, policy, out)
    p = LoopParams(params["theta"], params["omega"], params["omega0"])
    sched = single_loop_schedule(p)
    data = field_timeline(sched, params["samples"])
    mag = np.linalg.norm(data[:, 1:], axis=1)
    expected = tqd_field_magnitude(p)
    path = run.artifact("fields.csv")
    with open(path, "w", newline="") as fh:
        fh.write("t,Bx,By,Bz,Bmag\n")
        for row, m in zip(data, mag):
            fh.write(",".join(_fmt(v) for v in (*row, m)) + "\n")
    run.check("field_magnitude_drift", float(np.max(np.abs(mag - expected))), 1e-9)
    run.notes["expected_magnitude"] = expected
    return run.finish()


def _run_evolve(params: dict, policy: StepPolicy, out: Path) -> int:
    run = Run("evolve", params, policy, out)
    p = LoopParams(params["theta"], params["omega"], params["omega0"])
    label = params["label"]
    if label not in (0, 1):
        raise ConfigError("evolve.label must be 0 or 1")
    sched = single_loop_schedule(p, corrected=params["corrected"])
    traj = evolve_eigenstate(sched, label, policy, samples=params["samples"])
    fid = tracking_fidelity(traj, label)
    trajectory_to_csv(traj, run.artifact("trajectory.csv"), {"fidelity": fid})
    run.notes["min_tracking_fidelity"] = float(fid.min())
    if params["corrected"]:
        dec = loop_phase_decomposition(traj, label)
        _write_json(run.artifact("phases.json"), dec.to_dict())
        run.check("tracking_infidelity", 1.0 - float(fid.min()), 1e-7)
        run.check("geometric_phase_deviation", dec.geometric_deviation, 1e-6)
    return run.finish()


def _run_echo(params: dict, policy: StepPolicy, out: Path) -> int:
    run = Run("echo", params, policy, out)
    p = LoopParams(params["theta"], params["omega"], params["omega0"])
    label = params["label"]
    if label not in (0, 1):
        raise ConfigError("echo.label must be 0 or 1")
    sched = build_echo_sequence(p, omega_pi=params["omega_pi"])
    traj = evolve_eigenstate(sched, label, policy, samples=params["samples"])
    fid = tracking_fidelity(traj, label)
    trajectory_to_csv(traj, run.artifact("trajectory.csv"), {"fidelity": fid})

    target = closed_form_echo_gate(p)
    dist = gate_distance(traj.final_propagator, target)
    dec = echo_phase_decomposition(traj, label)
    _write_json(run.artifact("phases.json"), dec.to_dict())
    _write_json(
        run.artifact("gate.json"),
        {
            "distance": dist,
            "realized": _matrix(traj.final_propagator),
            "target": _matrix(target),
            "labels": sched.labels(),
        },
    )
    run.check("echo_gate_distance", dist, 1e-6)
    run.check("residual_dynamical_phase", abs(dec.dynamical), 1e-6)
    return run.finish()


def _run_gate(params: dict, policy: StepPolicy, out: Path) -> int:
    run = Run("gate", params, policy, out)
    spec = SingleGateSpec(params["axis_angle"], params["gate_angle"])
    rep = synthesize_single_gate(
        spec,
        omega=params["omega"],
        omega0=params["omega0"],
        omega_pi=params["omega_pi"],
        policy=policy,
    )
    _write_json(
        run.artifact("gate.json"),
        {
            "axis_angle": spec.axis_angle,
            "gate_angle": spec.gate_angle,
            "cone_angle": rep.cone_angle,
            "drive_rotation": rep.rotation,
            "distance": rep.distance,
            "realized": _matrix(rep.realized),
            "target": _matrix(rep.target),
        },
    )
    run.check("gate_distance", rep.distance, 1e-6)
    return run.finish()


def _run_twoqubit(params: dict, policy: StepPolicy, out: Path) -> int:
    run = Run("twoqubit", params, policy, out)
    p = TwoQubitParams(
        params["omega_i"], params["coupling"], params["omega"], params["omega_pi"]
    )
    rep = synthesize_two_qubit_gate(p, policy=policy)
    _write_json(
        run.artifact("gate.json"),
        {
            "delta_omega": rep.delta_omega,
            "leakage": rep.leakage,
            "phase_residuals": list(rep.phase_residuals),
            "distance": rep.distance,
            "realized": _matrix(rep.realized),
            "target": _matrix(rep.target),
        },
    )
    run.check("eigenbasis_leakage", rep.leakage, 1e-6)
    run.check("conditional_phase_residual", max(rep.phase_residuals), 1e-5)
    return run.finish()


def _run_expmap(params: dict, policy: StepPolicy, out: Path) -> int:
    run = Run("expmap", params, policy, out)
    p = TwoQubitParams(params["omega_i"], params["coupling"], params["omega"])
    rep = verify_exp_equivalence(p, policy=policy, field_draws=params["draws"])
    fwd = experimental_params(p)
    rev = experimental_params(p.reversed())
    _write_json(
        run.artifact("expmap.json"),
        {
            "forward": vars(fwd).copy(),
            "reversed": vars(rev).copy(),
            "max_field_deviation": rep.max_field_deviation,
            "gate_deviation": rep.gate_deviation,
            "field_draws": rep.field_draws,
        },
    )
    run.check("field_map_deviation", rep.max_field_deviation, 1e-10)
    run.check("gate_equivalence_distance", rep.gate_deviation, 1e-5)
    return run.finish()


def _scan_point(theta: float, omega0: float, ratio: float, label: int, policy: StepPolicy):
    p = LoopParams(theta=theta, omega=ratio * omega0, omega0=omega0)
    corr = evolve_eigenstate(single_loop_schedule(p), label, policy, samples=64)
    bare = evolve_eigenstate(
        single_loop_schedule(p, corrected=False), label, policy, samples=64
    )
    return (
        float(tracking_fidelity(corr, label).min()),
        float(tracking_fidelity(bare, label).min()),
    )


def _run_scan(params: dict, policy: StepPolicy, out: Path) -> int:
    run = Run("scan", params, policy, out)
    label = params["label"]
    if label not in (0, 1):
        raise ConfigError("scan.label must be 0 or 1")
    ratios = params["ratios"]
    if any(r == 0.0 for r in ratios):
        raise ConfigError("scan.ratios must be nonzero")
    with ThreadPoolExecutor(max_workers=params["workers"]) as pool:
        futures = [
            pool.submit(_scan_point, params["theta"], params["omega0"], r, label, policy)
            for r in ratios
        ]
        results = [f.result() for f in futures]  # submission order, deterministic
    path = run.artifact("scan.csv")
    with open(path, "w", newline="") as fh:
        fh.write("ratio,min_fidelity_corrected,min_fidelity_uncorrected\n")
        for r, (fc, fu) in zip(ratios, results):
            fh.write(f"{_fmt(r)},{_fmt(fc)},{_fmt(fu)}\n")
    worst = max(1.0 - fc for fc, _ in results)
    run.check("tracking_infidelity_worst", worst, 1e-7)
    run.notes["uncorrected_min_fidelities"] = {
        _fmt(r): fu for r, (_, fu) in zip(ratios, results)
    }
    return run.finish()


def _run_verify_all(out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    results = run_all()
    _write_json(out / "acceptance.json", [r.to_dict() for r in results])
    print(f"  wrote {out / 'acceptance.json'}")
    ok = all(r.passed for r in results)
    print("OK" if ok else "CHECKS FAILED")
    return 0 if ok else 1


_RUNNERS = {
    "fields": _run_fields,
    "evolve": _run_evolve,
    "echo": _run_echo,
    "gate": _run_gate,
    "twoqubit": _run_twoqubit,
    "expmap": _run_expmap,
    "scan": _run_scan,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tqdecho",
        description="Transitionless spin-echo simulator and gate synthesis runner.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for kind in _RUNNERS:
        sp = sub.add_parser(kind, help=f"run the {kind} scenario from a JSON config")
        sp.add_argument("--config", required=True, help="path to the scenario config")
        sp.add_argument("--out", default=".", help="output directory (default: .)")
        grp = sp.add_mutually_exclusive_group()
        grp.add_argument(
            "--substeps", type=int, default=None,
            help="override integration substeps per segment",
        )
        grp.add_argument(
            "--tol", type=float, default=None,
            help="switch to adaptive stepping with this target error",
        )

    sp = sub.add_parser("verify-all", help="run the full verification suite")
    sp.add_argument("--out", default=".", help="output directory (default: .)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    out = Path(args.out)
    if args.command == "verify-all":
        return _run_verify_all(out)
    try:
        params = load_config(args.config, args.command)
        policy = _policy(params, args)
        return _RUNNERS[args.command](params, policy, out)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
