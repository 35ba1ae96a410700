"""Command-line front end.

Usage::

    stieltjes-pop run CONFIG.json [--out DIR] [--seed N]
    stieltjes-pop <kind> CONFIG.json [--out DIR] [--seed N]
    stieltjes-pop print-schema          (also: stieltjes-pop --print-schema)

Config documents are JSON with ``"schema": 1`` and a ``"kind"`` among
``integrate, ibp_check, prop_suite, hm_check, reproduction, equilibrium,
threshold, r_monotone_suite``.  Function records are ``{"grid": [...], "values": [...],
"tail": {...}}`` with tails ``{"kind": "limit_value", "limit": L}`` or
``{"kind": "exponential_decay", "rate": r, "limit": L, "value": v}``; a record
``{"file": "path.json"}`` loads one from disk (relative to the config).  Rate
profiles additionally accept ``{"constant": c}``.

Every run writes ``summary.json`` and one CSV into the output directory:

- integrate: ``integral.csv`` (value, truncation_point, est_tail_error)
- ibp_check: ``ibp.csv`` (residual, tolerance, pass)
- prop_suite: ``suite.csv`` (instance_id, property, margin, pass, asserted)
- hm_check: ``hm.csv`` (p, lhs, rhs_hm, rhs_paper, holds_hm, holds_paper)
- reproduction: ``reproduction.csv`` (x, beta, Pi)
- equilibrium: ``equilibrium.csv`` (x, u, Pi), at most 4001 rows
- threshold: ``threshold.csv`` (R0, conclusion, monotone)
- r_monotone_suite: ``r_monotone.csv`` (instance_id, property, margin, pass, asserted)

Floats use 17 significant digits, booleans ``true``/``false``, LF line ends.
Exit status: 0 success, 1 a checked property failed, 2 configuration or
numerical error (a JSON error record goes to stderr).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import difflib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .grid_fn import BVFn, DomainError, GridFn, Interval, MonotoneFn
from .monotone_props import HM_PS, hm_evaluate, run_property_suite
from .population import (
    Density,
    EnvironmentKernel,
    InnerIterationError,
    Modulation,
    PopulationConfig,
    RateSpec,
    VitalRates,
    _Model,
    run_R_monotone_suite,
    solve_equilibrium,
    threshold_report,
)
from .stieltjes import (
    PreconditionError,
    QuadratureConfig,
    TruncationError,
    functional_F,
    integrate,
    integrate_by_parts_residual,
)

KINDS = ("integrate", "ibp_check", "prop_suite", "hm_check", "reproduction", "equilibrium", "threshold",
         "r_monotone_suite")
MAX_CSV_ROWS = 4001

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_tail = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["limit_value", "exponential_decay"]},
        "limit": _num,
        "rate": _pos,
        "value": _num,
    },
}
_fn = {
    "oneOf": [
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["grid", "values"],
            "properties": {
                "grid": {"type": "array", "items": _num, "minItems": 2},
                "values": {"type": "array", "items": _num, "minItems": 2},
                "tail": _tail,
            },
        },
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["file"],
            "properties": {"file": {"type": "string"}},
        },
    ]
}
_profile = {
    "oneOf": [
        _fn,
        {"type": "object", "additionalProperties": False, "required": ["constant"],
         "properties": {"constant": _num}},
    ]
}
_kernel = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["total", "window", "above", "custom"]},
        "width": _pos,
        "x": {"type": "array", "items": _num},
        "y": {"type": "array", "items": _num},
        "w": {"type": "array", "items": {"type": "array", "items": _num}},
    },
}
_rate = {
    "type": "object",
    "additionalProperties": False,
    "required": ["profile", "modulation"],
    "properties": {
        "profile": _profile,
        "modulation": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["response", "c", "kernel"],
                    "properties": {
                        "response": {"enum": ["exp_decay", "hill", "linear_up"]},
                        "c": {"type": "number", "minimum": 0},
                        "kernel": _kernel,
                    },
                },
            ]
        },
    },
}
_rates = {
    "type": "object",
    "additionalProperties": False,
    "required": ["beta", "mu", "growth"],
    "properties": {"beta": _rate, "mu": _rate, "growth": _rate},
}
_cfg = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "panel_points": {"type": "integer", "minimum": 2},
        "tail_tol": _pos,
        "max_domain": _pos,
    },
}
_solver = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "n_nodes": {"type": "integer", "minimum": 3},
        "x_max": _pos,
        "hazard_span": _pos,
        "tail_tol": _pos,
        "tol_R": _pos,
        "tol_inner": _pos,
        "tol_fix": _pos,
        "max_inner": {"type": "integer", "minimum": 1},
        "damping": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "bracket_tol": _pos,
        "max_outer": {"type": "integer", "minimum": 1},
    },
}

_KIND_FIELDS = {
    "integrate": {"h": _fn, "g": _fn},
    "ibp_check": {"h": _fn, "g": _fn},
    "prop_suite": {"n_instances": {"type": "integer", "minimum": 1},
                   "p_values": {"type": "array", "items": _pos, "minItems": 1},
                   "debug_corrupt_integrator": {"type": "boolean"}},
    "hm_check": {"h": _fn, "g": _fn, "p": {"type": "array", "items": _pos, "minItems": 1}},
    "reproduction": {"rates": _rates, "density": {"oneOf": [{"const": "zero"}, _fn]}},
    "equilibrium": {"rates": _rates,
                    "bracket": {"type": "array", "items": {"type": "number", "minimum": 0},
                                "minItems": 2, "maxItems": 2}},
    "threshold": {"rates": _rates},
    "r_monotone_suite": {"n_instances": {"type": "integer", "minimum": 1}},
}
_KIND_REQUIRED = {
    "integrate": ["h", "g"],
    "ibp_check": ["h", "g"],
    "prop_suite": ["n_instances"],
    "hm_check": ["h", "g", "p"],
    "reproduction": ["rates", "density"],
    "equilibrium": ["rates", "bracket"],
    "threshold": ["rates"],
    "r_monotone_suite": ["n_instances"],
}
_COMMON = {
    "schema": {"const": 1},
    "kind": {"enum": list(KINDS)},
    "seed": {"type": "integer"},
    "output": {"type": "string"},
    "cfg": _cfg,
    "solver": _solver,
}


def config_schema() -> dict:
    """JSON Schema (draft 2020-12) for scenario configs."""
    branches = []
    for kind in KINDS:
        props = dict(_COMMON)
        props["kind"] = {"const": kind}
        props.update(_KIND_FIELDS[kind])
        branches.append({
            "if": {"properties": {"kind": {"const": kind}}, "required": ["kind"]},
            "then": {"type": "object", "additionalProperties": False, "properties": props,
                     "required": ["schema", "kind"] + _KIND_REQUIRED[kind]},
        })
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "stieltjes-pop scenario",
        "type": "object",
        "required": ["schema", "kind"],
        "properties": {"schema": {"const": 1}, "kind": {"enum": list(KINDS)}},
        "allOf": branches,
    }


class ConfigError(ValueError):
    """All problems found in a config document."""

    def __init__(self, errors: list):
        super().__init__("; ".join(f"{e['path']}: {e['message']}" for e in errors))
        self.errors = errors


@dataclass
class ScenarioConfig:
    kind: str
    seed: int
    output_path: str
    cfg: QuadratureConfig
    solver: PopulationConfig
    fields: dict = field(default_factory=dict)
    source: Optional[str] = None


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _leaves(err) -> list:
    # oneOf: follow the branch(es) that got furthest into the instance
    if err.validator != "oneOf" or not err.context:
        return [err]
    depth = max(len(e.absolute_path) for e in err.context)
    if depth == len(err.absolute_path):
        # no branch went deeper; prefer a branch failing for a nested reason
        nested = [e for e in err.context if e.validator == "oneOf"]
        if nested:
            return [x for e in nested for x in _leaves(e)]
        return [err]
    out = []
    for e in err.context:
        if len(e.absolute_path) == depth:
            out.extend(_leaves(e))
    return out


def _schema_errors(doc) -> list:
    validator = jsonschema.Draft202012Validator(config_schema())
    errors, seen = [], set()
    for err in validator.iter_errors(doc):
        leaves = _leaves(err)
        for e in leaves:
            path = _path(e.absolute_path)
            if e.validator == "additionalProperties":
                allowed = list(e.schema.get("properties", {}))
                for key in sorted(set(e.instance) - set(allowed)):
                    hint = difflib.get_close_matches(key, allowed, n=1)
                    msg = f"unknown key {key!r}" + (f"; did you mean {hint[0]!r}?" if hint else "")
                    item = {"path": _path(list(e.absolute_path) + [key]), "message": msg}
                    if (item["path"], msg) not in seen:
                        seen.add((item["path"], msg))
                        errors.append(item)
                continue
            if (path, e.message) not in seen:
                seen.add((path, e.message))
                errors.append({"path": path, "message": e.message})
    return errors


def _load_fn(rec, base: Path, path: str, errors: list) -> Optional[GridFn]:
    if "file" in rec:
        p = base / rec["file"]
        if not p.is_file():
            errors.append({"path": path + ".file", "message": f"file not found: {p}"})
            return None
        try:
            rec = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            errors.append({"path": path + ".file",
                           "message": f"{p}: line {exc.lineno} column {exc.colno}: {exc.msg}"})
            return None
    try:
        if "constant" in rec:
            return GridFn.constant(float(rec["constant"]))
        return GridFn.from_dict(rec)
    except (ValueError, KeyError, TypeError) as exc:
        errors.append({"path": path, "message": str(exc)})
        return None


def _load_rates(doc, base: Path, errors: list) -> Optional[VitalRates]:
    specs = {}
    for name in ("beta", "mu", "growth"):
        rec = doc[name]
        path = f"rates.{name}"
        prof = _load_fn(rec["profile"], base, path + ".profile", errors)
        mod = None
        try:
            if rec["modulation"] is not None:
                m = rec["modulation"]
                k = m["kernel"]
                kernel = EnvironmentKernel(k["kind"], width=k.get("width"), xs=k.get("x"),
                                           ys=k.get("y"), w=k.get("w"))
                mod = Modulation(m["response"], float(m["c"]), kernel)
            if prof is not None:
                specs[name] = RateSpec(prof, mod)
        except (ValueError, TypeError) as exc:
            errors.append({"path": path, "message": str(exc)})
    if len(specs) < 3:
        return None
    return VitalRates(specs["beta"], specs["mu"], specs["growth"])


def parse_config(doc, base: Path = Path("."), source: Optional[str] = None) -> ScenarioConfig:
    """Validate a decoded config document; raises :class:`ConfigError` listing every problem."""
    errors = _schema_errors(doc)
    if errors:
        raise ConfigError(errors)
    kind = doc["kind"]
    try:
        cfg = QuadratureConfig(**doc.get("cfg", {}))
    except ValueError as exc:
        errors.append({"path": "cfg", "message": str(exc)})
        cfg = None
    try:
        solver = PopulationConfig(**doc.get("solver", {}))
    except ValueError as exc:
        errors.append({"path": "solver", "message": str(exc)})
        solver = None
    fields = {}
    for key in ("h", "g"):
        if key in doc:
            fields[key] = _load_fn(doc[key], base, key, errors)
    if "rates" in doc:
        fields["rates"] = _load_rates(doc["rates"], base, errors)
    if "density" in doc:
        if doc["density"] == "zero":
            fields["density"] = Density.zero()
        else:
            u = _load_fn(doc["density"], base, "density", errors)
            if u is not None:
                try:
                    fields["density"] = Density(u)
                except ValueError as exc:
                    errors.append({"path": "density", "message": str(exc)})
    for key in ("n_instances", "p", "p_values", "bracket", "debug_corrupt_integrator"):
        if key in doc:
            fields[key] = doc[key]
    if "bracket" in doc and not doc["bracket"][0] < doc["bracket"][1]:
        errors.append({"path": "bracket", "message": "need lo < hi"})
    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(kind, int(doc.get("seed", 0)), doc.get("output", "."), cfg, solver,
                          fields, source)


def load_config(path) -> ScenarioConfig:
    """Read and validate a config file."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError([{"path": "<file>", "message": f"config not found: {p}"}])
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError([{"path": "<file>",
                            "message": f"parse error at line {exc.lineno} column {exc.colno}: {exc.msg}"}])
    return parse_config(doc, p.parent, str(p))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    if v is None:
        return ""
    return str(v)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def _stride(n: int) -> int:
    return max(1, math.ceil((n - 1) / (MAX_CSV_ROWS - 1)))


def _corrupt_F(H, G, cfg):
    # test hook: an integrator with the wrong sign must trip the suite
    return -functional_F(H, G, cfg)


def _run(sc: ScenarioConfig, out: Path) -> tuple[int, dict]:
    f = sc.fields
    cfg = sc.cfg
    if sc.kind == "integrate":
        r = integrate(f["h"], BVFn(f["g"]), cfg)
        write_csv(out / "integral.csv", ["value", "truncation_point", "est_tail_error"],
                  [[r.value, r.truncation_point, r.est_tail_error]])
        return 0, dataclasses.asdict(r)
    if sc.kind == "ibp_check":
        h = MonotoneFn.infer(f["h"])
        g = BVFn(f["g"])
        res = integrate_by_parts_residual(h, g, Interval(g.a, g.b), cfg)
        tol = 1e-7 if g.tail is None else 10 * cfg.tail_tol
        write_csv(out / "ibp.csv", ["residual", "tolerance", "pass"], [[res, tol, res < tol]])
        return (0 if res < tol else 1), {"residual": res, "tolerance": tol}
    if sc.kind == "prop_suite":
        functional = _corrupt_F if f.get("debug_corrupt_integrator") else functional_F
        ps = tuple(f.get("p_values", HM_PS))
        rep = run_property_suite(f["n_instances"], sc.seed, cfg, functional, ps)
        write_csv(out / "suite.csv", ["instance_id", "property", "margin", "pass", "asserted"],
                  [[r.instance_id, r.property, r.margin, r.passed, r.asserted] for r in rep.rows])
        return (0 if rep.ok else 1), {"ok": rep.ok, "properties": rep.summary()}
    if sc.kind == "hm_check":
        h = MonotoneFn.infer(f["h"])
        g = BVFn(f["g"])
        reps = [hm_evaluate(h, g, float(p), cfg) for p in f["p"]]
        write_csv(out / "hm.csv", ["p", "lhs", "rhs_hm", "rhs_paper", "holds_hm", "holds_paper"],
                  [[r.p, r.lhs, r.rhs_hm, r.rhs_paper, r.holds_hm, r.holds_paper] for r in reps])
        ok = all(r.holds_hm for r in reps)
        return (0 if ok else 1), {"ok": ok, "reports": [dataclasses.asdict(r) for r in reps]}
    solver = sc.solver
    if sc.kind == "r_monotone_suite":
        rep = run_R_monotone_suite(f["n_instances"], sc.seed, solver)
        write_csv(out / "r_monotone.csv", ["instance_id", "property", "margin", "pass", "asserted"],
                  [[r.instance_id, r.property, r.margin, r.passed, r.asserted] for r in rep.rows])
        return (0 if rep.ok else 1), {"ok": rep.ok, "properties": rep.summary()}
    rates = f["rates"]
    if sc.kind == "reproduction":
        u = f["density"]
        m = _Model(rates, solver)
        st = m.state(u)
        R = m.R(st)
        s = _stride(m.x.size)
        write_csv(out / "reproduction.csv", ["x", "beta", "Pi"],
                  zip(m.x[::s], st.beta[::s], st.Pi[::s]))
        return 0, {"R": R, "density_total": u.total}
    if sc.kind == "equilibrium":
        res = solve_equilibrium(rates, solver, tuple(f["bracket"]))
        summary = {"status": res.status, "converged": res.converged, "R0": res.R0,
                   "B_star": res.B_star, "R_at_star": res.R_at_star, "residual": res.residual,
                   "iterations": list(res.iterations), "bracket": list(res.bracket)}
        if res.u_star is not None:
            x = res.grid
            s = _stride(x.size)
            summary["total_population"] = res.u_star.total
            write_csv(out / "equilibrium.csv", ["x", "u", "Pi"],
                      zip(x[::s], res.u_star.u.values[::s], res.Pi_star[::s]))
        else:
            write_csv(out / "equilibrium.csv", ["x", "u", "Pi"], [])
        return 0, summary
    if sc.kind == "threshold":
        rep = threshold_report(rates, solver)
        write_csv(out / "threshold.csv", ["R0", "conclusion", "monotone"],
                  [[rep.R0, rep.conclusion, rep.mode.monotone]])
        return 0, {"R0": rep.R0, "conclusion": rep.conclusion, "message": rep.message,
                   "monotone_mode": dataclasses.asdict(rep.mode)}
    raise ValueError(f"unknown kind {sc.kind!r}")


def _error(kind: str, message: str, code: int, **extra) -> int:
    rec = {"error": kind, "message": message, "exit_code": code}
    rec.update(extra)
    print(json.dumps(_jsonable(rec), sort_keys=True), file=sys.stderr)
    return code


def run_scenario(config: ScenarioConfig, out_dir=None, seed: Optional[int] = None) -> int:
    """Execute a validated scenario and write its outputs; returns the exit code."""
    if seed is not None:
        config = dataclasses.replace(config, seed=int(seed))
    out = Path(out_dir if out_dir is not None else config.output_path)
    out.mkdir(parents=True, exist_ok=True)
    try:
        code, result = _run(config, out)
    except (TruncationError, InnerIterationError) as exc:
        extra = {}
        if isinstance(exc, TruncationError):
            extra["best_estimate"] = dataclasses.asdict(exc.best)
        return _error(type(exc).__name__, str(exc), 2, **extra)
    except (ArithmeticError, PreconditionError, DomainError, ValueError) as exc:
        return _error(type(exc).__name__, str(exc), 2)
    summary = {
        "kind": config.kind,
        "seed": config.seed,
        "exit_code": code,
        "cfg": dataclasses.asdict(config.cfg),
        "solver": dataclasses.asdict(config.solver),
        "result": result,
    }
    with open(out / "summary.json", "w", newline="\n") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return code


def _add_run_args(p):
    p.add_argument("config", help="scenario config (JSON)")
    p.add_argument("--out", help="output directory (default: config 'output' or '.')")
    p.add_argument("--seed", type=int, help="override the config seed")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="stieltjes-pop", description=__doc__.split("\n")[0])
    parser.add_argument("--print-schema", action="store_true", help="print the config schema and exit")
    sub = parser.add_subparsers(dest="command")
    _add_run_args(sub.add_parser("run", help="run any scenario"))
    sub.add_parser("print-schema", help="print the config JSON schema")
    for kind in KINDS:
        _add_run_args(sub.add_parser(kind.replace("_", "-"), help=f"run a '{kind}' scenario"))
    args = parser.parse_args(argv)
    if args.print_schema or args.command == "print-schema":
        print(json.dumps(config_schema(), indent=2, sort_keys=True))
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return _error("UsageError", "missing command", 2)
    try:
        sc = load_config(args.config)
    except ConfigError as exc:
        return _error("ConfigError", "invalid configuration", 2, errors=exc.errors)
    if args.command != "run" and args.command.replace("-", "_") != sc.kind:
        return _error("ConfigError", f"config kind {sc.kind!r} does not match command {args.command!r}", 2)
    return run_scenario(sc, args.out, args.seed)


if __name__ == "__main__":
    sys.exit(main())
