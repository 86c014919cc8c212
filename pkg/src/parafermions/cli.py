"""Command-line entry point: verification runs and report emission.

Every verb writes one report (JSON by default, CSV for the scan and table
verbs) and exits with 0 when all checked tolerances pass, 1 when one
fails, and 2 on a usage or input error. JSON reports have sorted keys,
floats printed with 17 significant digits, and embed the full run
configuration, so identical runs give byte-identical files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import cft
from .enumeration import holo_residual_report, observable
from .geometry import build_domain
from .holo import (
    DegenerateFugacityError,
    SpinParams,
    build_c2_system,
    build_on_system,
    build_potts_system,
    determinant_scan,
    null_space,
    projection_cosine,
    spectral_parameter,
)
from .models import (
    ModelId,
    WeightSet,
    c2_integrable_weights,
    dense_weights,
    fugacity_from_eta,
    on_integrable_weights,
    spin_value,
)
from .ybe import CONVENTIONS, convention_weights, diagram_ybe_residual, scan_conventions, tl_ybe_residual

__all__ = ["RunConfig", "UsageError", "run", "report_aggregate", "dumps", "main"]

VERBS = ("solve", "det-scan", "holo-verify", "ybe-verify", "cg", "report")
ANGLE_FIELDS = ("gamma", "eta", "alpha", "beta", "u", "psi1", "psi2")
EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    """Invalid flags or inputs; maps to exit status 2."""


@dataclass
class RunConfig:
    """Everything needed to reproduce one run.

    Angles are in radians. ``spin`` is ``"auto"`` (closed-form value) or a
    number given as a string.
    """

    verb: str
    model: str | None = None
    gamma: float | None = None
    eta: float | None = None
    alpha: float | None = None
    beta: float | None = None
    spin: str = "auto"
    u: float | None = None
    psi1: float | None = None
    psi2: float | None = None
    rows: int = 2
    cols: int = 2
    tol: float | None = None
    output: str | None = None
    format: str = "json"
    s_range: tuple[float, float] = (-1.0, 1.0)
    steps: int = 2000
    grid: str | None = None
    convention: str = "auto"
    printed: bool = False
    perturb: float = 0.0
    seed: int = 0
    inputs: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        # where the report is written does not affect its content
        del d["output"]
        d["s_range"] = list(self.s_range)
        d["inputs"] = list(self.inputs)
        return d


# ------------------------------------------------------------ serialisation


def _encode(obj: Any) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return json.dumps(str(x))
        text = format(x, ".17g")
        if not any(ch in text for ch in ".en"):
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(doc: Any) -> str:
    """Deterministic JSON: sorted keys, 17 significant digits, trailing newline."""
    return _encode(doc) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]], config: RunConfig) -> str:
    lines = ["# config: " + _encode(config.to_dict()), ",".join(header)]
    for row in rows:
        lines.append(",".join(format(float(v), ".17g") if isinstance(v, (float, int, np.floating)) else str(v) for v in row))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------- utilities


def _model(config: RunConfig) -> ModelId:
    if config.model is None:
        raise UsageError(f"{config.verb} needs --model")
    try:
        return ModelId.parse(config.model)
    except ValueError as exc:
        raise UsageError(f"unknown model {config.model!r}") from exc


def _angle(config: RunConfig, model: ModelId) -> float:
    """``gamma`` for the dense model, ``eta`` otherwise."""
    name = "gamma" if model is ModelId.DENSE else "eta"
    value = getattr(config, name)
    if value is None:
        raise UsageError(f"model {model.value} needs --{name}")
    return value


def _need(config: RunConfig, name: str) -> float:
    value = getattr(config, name)
    if value is None:
        raise UsageError(f"{config.verb} needs --{name.replace('_', '-')}")
    return value


def _spin(config: RunConfig, model: ModelId, angle: float) -> float:
    if config.spin == "auto":
        return spin_value(model, angle)
    try:
        return float(config.spin)
    except ValueError as exc:
        raise UsageError(f"--spin must be 'auto' or a number, got {config.spin!r}") from exc


def _fugacity(model: ModelId, angle: float) -> float:
    """``Q`` for the dense model, ``n`` otherwise."""
    if model is ModelId.DENSE:
        return 4 * math.cos(angle) ** 2
    return fugacity_from_eta(angle)


def _integrable_weights(model: ModelId, angle: float, params: SpinParams, printed: bool = False) -> WeightSet:
    if model is ModelId.DENSE:
        return dense_weights(angle, spectral_parameter(angle, params.alpha, params.beta))
    if model is ModelId.DILUTE:
        return on_integrable_weights(angle, params.phi, printed=printed)
    return c2_integrable_weights(angle, params.phi, printed=printed)


def _result(config: RunConfig, body: dict, failures: list[str]) -> tuple[int, dict]:
    doc = {"verb": config.verb, "config": config.to_dict(), "passed": not failures, "failures": failures, **body}
    return (EXIT_PASS if not failures else EXIT_FAIL), doc


# ------------------------------------------------------------------- verbs


def _solve(config: RunConfig) -> tuple[int, dict]:
    model = _model(config)
    angle = _angle(config, model)
    alpha = _need(config, "alpha")
    tol = config.tol if config.tol is not None else 1e-10
    s = _spin(config, model, angle)
    fug = _fugacity(model, angle)
    params = SpinParams(model, s, alpha, config.beta)
    if model is ModelId.DENSE:
        system = build_potts_system(fug, params)
    elif model is ModelId.DILUTE:
        system = build_on_system(fug, params)
    else:
        system = build_c2_system(fug, params)
    weights = _integrable_weights(model, angle, params, config.printed)
    vec = np.array([weights[k] for k in system.selected_unknowns])
    basis = null_space(system, tol)
    cosine = projection_cosine(basis, vec)
    scale = np.abs(system.complex_rows).max() * max(np.abs(vec).max(), 1e-300)
    residual = float(np.abs(system.residuals(weights)).max() / scale)
    try:
        scan = determinant_scan(model, fug, alpha, (-1.0, 1.0), config.steps)
        roots = scan.spins
    except DegenerateFugacityError:
        roots = []
    failures = []
    if residual >= tol:
        failures.append(f"system residual {residual:.3e} >= {tol:.1e}")
    if 1 - cosine >= tol:
        failures.append(f"null-space cosine deficit {1 - cosine:.3e} >= {tol:.1e}")
    body = {
        "model": model.value,
        "fugacity": fug,
        "alpha": alpha,
        "spin": s,
        "spin_roots": roots,
        "weights": dict(weights.weights),
        "residuals": {"system_max_relative": residual, "null_cosine_deficit": 1 - cosine},
        "null_dimension": len(basis),
        "notes": list(system.notes),
    }
    return _result(config, body, failures)


def _det_scan(config: RunConfig) -> tuple[int, dict | str]:
    model = _model(config)
    angle = _angle(config, model)
    alpha = _need(config, "alpha")
    fug = _fugacity(model, angle)
    try:
        scan = determinant_scan(model, fug, alpha, config.s_range, config.steps)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    target = spin_value(model, angle)
    lo, hi = config.s_range
    failures = []
    if lo < target < hi and not any(abs(r - target) < 1e-8 for r in scan.spins):
        failures.append(f"closed-form spin {target!r} not among the alpha-independent roots")
    if config.format == "csv":
        status = EXIT_PASS if not failures else EXIT_FAIL
        return status, _csv(("s", "det"), scan.samples, config)
    body = {
        "model": model.value,
        "fugacity": fug,
        "alpha": alpha,
        "method": scan.method,
        "closed_form_spin": target,
        "roots": [r.to_dict() for r in scan.roots],
        "spin_roots": scan.spins,
        "notes": list(scan.notes),
    }
    return _result(config, body, failures)


def _holo_verify(config: RunConfig) -> tuple[int, dict]:
    model = _model(config)
    angle = _angle(config, model)
    alpha = _need(config, "alpha")
    tol = config.tol if config.tol is not None else 1e-12
    s = _spin(config, model, angle)
    # weights always sit on the integrable branch; --spin only moves the observable
    params = SpinParams(model, spin_value(model, angle), alpha, config.beta)
    weights = _integrable_weights(model, angle, params, config.printed)
    if config.perturb:
        weights = weights.perturbed(config.perturb, np.random.default_rng(config.seed))
    try:
        domain = build_domain(config.rows, config.cols, alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    field_ = observable(domain, weights, s, beta=config.beta)
    report = holo_residual_report(field_, domain)
    failures = []
    if report.interior_max >= tol:
        failures.append(f"interior contour residual {report.interior_max:.3e} >= {tol:.1e}")
    body = {
        "model": model.value,
        "fugacity": weights.fugacity,
        "alpha": alpha,
        "spin": s,
        "weights": dict(weights.weights),
        "partition_function": report.partition_function,
        "interior_max": report.interior_max,
        "origin_adjacent_max": report.origin_adjacent_max,
        "residuals": {str(p): abs(report.residuals[p]) for p in sorted(report.residuals)},
        "origin_edge": field_.origin.edge,
    }
    return _result(config, body, failures)


def _ybe_verify(config: RunConfig) -> tuple[int, dict]:
    model = _model(config)
    tol = config.tol if config.tol is not None else 1e-10
    failures: list[str] = []
    if model is ModelId.DENSE:
        gamma = _need(config, "gamma")
        u = config.psi1 if config.psi1 is not None else config.u
        if u is None:
            raise UsageError("dense ybe-verify needs --psi1 (or --u)")
        v = _need(config, "psi2")
        w = u + v - gamma
        tl = tl_ybe_residual(gamma, u, v)
        diagram = diagram_ybe_residual(model, dense_weights(gamma, u), dense_weights(gamma, w), dense_weights(gamma, v))
        convention = "u+v-gamma"
        if max(tl, diagram.max_residual) >= tol:
            failures.append(f"residual {max(tl, diagram.max_residual):.3e} >= {tol:.1e}")
        body = {"convention": convention, "tl_residual": tl}
    else:
        eta = _need(config, "eta")
        p1, p2 = _need(config, "psi1"), _need(config, "psi2")
        if config.convention == "auto":
            candidates = list(CONVENTIONS)
        else:
            candidates = [c for c in CONVENTIONS if c.name == config.convention]
            if not candidates:
                raise UsageError(f"unknown convention {config.convention!r}; choose from {[c.name for c in CONVENTIONS]}")
        results = scan_conventions(model, [(eta, p1, p2)], conventions=candidates, printed=config.printed)
        best = min(results, key=lambda r: r.max_residual)
        passing = [r.convention.name for r in results if r.passes(tol)]
        W1, W2, W3 = convention_weights(model, eta, p1, p2, best.convention, printed=config.printed)
        diagram = diagram_ybe_residual(model, W1, W2, W3)
        convention = best.convention.name
        if not passing:
            failures.append(f"no convention reaches {tol:.1e} (best {convention}: {best.max_residual:.3e})")
        body = {"convention": convention, "passing_conventions": passing, "scan": [r.to_dict() for r in results]}
    body.update(
        {
            "model": model.value,
            "classes": [c.to_dict() for c in diagram.classes],
            "max_residual": diagram.max_residual,
            "relative_residual": diagram.relative_residual,
        }
    )
    return _result(config, body, failures)


def _parse_grid(spec: str, degrees: bool) -> tuple[str, np.ndarray]:
    try:
        name, lo, hi, count = spec.split(":")
        lo_f, hi_f, n = float(lo), float(hi), int(count)
    except ValueError as exc:
        raise UsageError(f"--grid must look like gamma:LO:HI:N or eta:LO:HI:N, got {spec!r}") from exc
    if name not in ("gamma", "eta") or n < 1:
        raise UsageError(f"--grid must look like gamma:LO:HI:N or eta:LO:HI:N, got {spec!r}")
    if degrees:
        lo_f, hi_f = math.radians(lo_f), math.radians(hi_f)
    return name, np.linspace(lo_f, hi_f, n)


def _cg(config: RunConfig) -> tuple[int, dict | str]:
    if config.grid is None:
        raise UsageError("cg needs --grid")
    name, values = _parse_grid(config.grid, False)
    tol = config.tol if config.tol is not None else 1e-12
    rows = []
    failures = []
    for x in values:
        x = float(x)
        if name == "gamma":
            g, s, expected = cft.dense_coupling(x), spin_value(ModelId.DENSE, x), "h31"
        else:
            g, s, expected = cft.dilute_coupling(x), spin_value(ModelId.DILUTE, x), "h21"
        if g <= 0:
            rows.append({name: x, "g": g, "c": math.nan, "s": s, "h21": math.nan, "h31": math.nan})
            continue
        row = {name: x, "g": g, "c": cft.central_charge(g), "s": s,
               "h21": cft.conformal_weight(g, 2, 1), "h31": cft.conformal_weight(g, 3, 1)}
        rows.append(row)
        if abs(row[expected] - s) >= tol:
            failures.append(f"s != {expected} at {name}={x!r} (diff {abs(row[expected] - s):.3e})")
    header = (name, "g", "c", "s", "h21", "h31")
    status = EXIT_PASS if not failures else EXIT_FAIL
    if config.format == "csv":
        return status, _csv(header, [[r[h] for h in header] for r in rows], config)
    return _result(config, {"columns": list(header), "rows": rows, "identity": f"s = {'h31' if name == 'gamma' else 'h21'}"}, failures)


def report_aggregate(paths: Sequence[str | Path]) -> dict:
    """Merge run reports into a pass/fail matrix keyed by model and verb.

    Raises:
        UsageError: if a file is missing or is not a run report.
    """
    matrix: dict[str, dict[str, bool]] = {}
    runs = []
    for path in paths:
        try:
            doc = json.loads(Path(path).read_text())
            verb, passed = doc["verb"], bool(doc["passed"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"malformed report {path}: {exc}") from exc
        model = doc.get("model") or (doc.get("config") or {}).get("model") or "-"
        cell = matrix.setdefault(str(model), {})
        cell[verb] = cell.get(verb, True) and passed
        runs.append({"path": str(path), "model": model, "verb": verb, "passed": passed, "failures": doc.get("failures", [])})
    return {"runs": runs, "matrix": matrix, "all_passed": all(r["passed"] for r in runs)}


def _report(config: RunConfig) -> tuple[int, dict]:
    summary = report_aggregate(config.inputs)
    failures = [f"{r['path']}: {r['verb']} failed" for r in summary["runs"] if not r["passed"]]
    return _result(config, summary, failures)


_DISPATCH = {
    "solve": _solve,
    "det-scan": _det_scan,
    "holo-verify": _holo_verify,
    "ybe-verify": _ybe_verify,
    "cg": _cg,
    "report": _report,
}


def run(config: RunConfig) -> tuple[int, dict | str]:
    """Execute one verb; returns the exit status and the report.

    Raises:
        UsageError: on invalid configuration.
    """
    if config.verb not in _DISPATCH:
        raise UsageError(f"unknown verb {config.verb!r}")
    if config.tol is not None and not config.tol > 0:
        raise UsageError("--tol must be positive")
    if config.format not in ("json", "csv"):
        raise UsageError("--format must be json or csv")
    if config.format == "csv" and config.verb not in ("det-scan", "cg"):
        raise UsageError("csv output is available for det-scan and cg only")
    return _DISPATCH[config.verb](config)


# ------------------------------------------------------------------ parsing


def _s_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}") from exc
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parafermions", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb)
        p.add_argument("--output", "-o", help="report path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--tol", type=float)
        p.add_argument("--degrees", action="store_true", help="angle flags are in degrees")
        if verb == "report":
            p.add_argument("inputs", nargs="*", help="run reports to aggregate")
            continue
        if verb == "cg":
            p.add_argument("--grid", required=True, help="gamma:LO:HI:N or eta:LO:HI:N")
            continue
        p.add_argument("--model", required=True, choices=("dense", "dilute", "c2", "potts", "on", "c21"))
        p.add_argument("--gamma", type=float)
        p.add_argument("--eta", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--spin", default="auto")
        p.add_argument("--u", type=float)
        p.add_argument("--psi1", type=float)
        p.add_argument("--psi2", type=float)
        p.add_argument("--rows", type=int, default=2)
        p.add_argument("--cols", type=int, default=2)
        p.add_argument("--s-range", type=_s_range, default=(-1.0, 1.0))
        p.add_argument("--steps", type=int, default=2000)
        p.add_argument("--convention", default="auto")
        p.add_argument("--printed", action="store_true", help="use the literature form of the weights")
        p.add_argument("--perturb", type=float, default=0.0, help="relative weight perturbation")
        p.add_argument("--seed", type=int, default=0)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {f.name: getattr(args, f.name) for f in dataclasses.fields(RunConfig) if hasattr(args, f.name)}
    if "inputs" in values:
        values["inputs"] = tuple(values["inputs"])
    if "s_range" in values:
        values["s_range"] = tuple(values["s_range"])
    if args.degrees:
        for name in ANGLE_FIELDS:
            if values.get(name) is not None:
                values[name] = math.radians(values[name])
        if values.get("grid"):
            name, values_grid = _parse_grid(values["grid"], True)
            values["grid"] = f"{name}:{float(values_grid[0])!r}:{float(values_grid[-1])!r}:{len(values_grid)}"
    return RunConfig(**values)


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    """Rewrite ``--flag -1,1`` as ``--flag=-1,1`` so argparse accepts negative values."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if tok.startswith("--") and "=" not in tok and nxt is not None and nxt[:1] == "-" and nxt[1:2].isdigit():
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        config = config_from_args(args)
        status, doc = run(config)
    except UsageError as exc:
        print(f"parafermions: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = doc if isinstance(doc, str) else dumps(doc)
    if config.output:
        Path(config.output).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
