"""Command-line front end.

``lpproj run`` reads a JSON request (project / derivative / verify / compare)
from a file or stdin and writes a JSON report to stdout.  ``lpproj suite``
executes a named property suite.  Exit codes: 0 ok, 1 computation or suite
failure, 2 schema/usage error.  Environment variables are never consulted;
identical requests with identical seeds produce bit-identical reports.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .core import IndexMask, LpVector
from .errors import LpProjError, SchemaError
from .oracles import (
    OracleConfig,
    brute_gpi,
    brute_mpi,
    derivative_with_fallback,
    project_with_fallback,
    vi_certificate,
)
from .sets import ConvexSetSpec, SetKind, classify_region
from .suites import run_suite

_COMMANDS = ("project", "derivative", "verify", "compare")
_FLAVORS = ("generalized", "metric")


# ---------------------------------------------------------------------------
# JSON emission: floats carry 17 significant digits so every value
# round-trips exactly


def _fmt(value, pretty, indent):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        items = [_fmt(v, pretty, indent + 1) for v in value]
        if not pretty:
            return "[" + ", ".join(items) + "]"
        pad = "  " * (indent + 1)
        return "[\n" + ",\n".join(pad + s for s in items) + "\n" + "  " * indent + "]"
    if isinstance(value, dict):
        items = [
            (json.dumps(str(k)), _fmt(v, pretty, indent + 1)) for k, v in value.items()
        ]
        if not pretty:
            return "{" + ", ".join(f"{k}: {v}" for k, v in items) + "}"
        pad = "  " * (indent + 1)
        body = ",\n".join(f"{pad}{k}: {v}" for k, v in items)
        return "{\n" + body + "\n" + "  " * indent + "}"
    raise TypeError(f"cannot serialize {type(value)!r}")


def dumps_report(report: dict, pretty: bool = False) -> str:
    return _fmt(report, pretty, 0)


# ---------------------------------------------------------------------------
# request parsing


def _require(cond, message):
    if not cond:
        raise SchemaError(message)


def _as_coords(value, field):
    _require(isinstance(value, list) and len(value) >= 1, f"'{field}' must be a nonempty array")
    _require(
        all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value),
        f"'{field}' must contain only numbers",
    )
    return [float(v) for v in value]


def _parse_set(obj, n):
    _require(isinstance(obj, dict), "'set' must be an object")
    kind = obj.get("kind")
    kinds = {k.value: k for k in SetKind}
    _require(kind in kinds, f"set.kind must be one of {sorted(kinds)}")
    kind = kinds[kind]
    mask = None
    if kind is not SetKind.FULL_BALL:
        raw = obj.get("mask")
        _require(
            isinstance(raw, list) and len(raw) >= 1, "set.mask must be a nonempty array"
        )
        _require(
            all(isinstance(i, int) and not isinstance(i, bool) and 0 <= i < n for i in raw),
            f"set.mask entries must be integers in [0, {n})",
        )
        _require(len(set(raw)) == len(raw), "set.mask entries must be unique")
        mask = IndexMask.of(raw)
    r = None
    if kind is not SetKind.SUBSPACE:
        r = obj.get("r")
        _require(
            isinstance(r, (int, float)) and not isinstance(r, bool) and r > 0,
            "set.r must be a positive number",
        )
        r = float(r)
    else:
        _require("r" not in obj, "subspace takes no radius")
    return ConvexSetSpec(kind, r=r, mask=mask)


def _parse_oracle(obj, seed_default, tol_override):
    fields = {"rng_seed": seed_default}
    if obj is not None:
        _require(isinstance(obj, dict), "'oracle' must be an object")
        allowed = {
            "max_iters": int,
            "step_init": float,
            "tol_opt": float,
            "vi_samples": int,
            "rng_seed": int,
            "fd_t_sequence": list,
        }
        for key, value in obj.items():
            _require(key in allowed, f"unknown oracle option {key!r}")
            if key == "fd_t_sequence":
                fields[key] = tuple(_as_coords(value, "oracle.fd_t_sequence"))
            elif allowed[key] is int:
                _require(
                    isinstance(value, int) and not isinstance(value, bool),
                    f"oracle.{key} must be an integer",
                )
                fields[key] = value
            else:
                _require(
                    isinstance(value, (int, float)) and not isinstance(value, bool),
                    f"oracle.{key} must be a number",
                )
                fields[key] = float(value)
    if tol_override is not None:
        fields["tol_opt"] = float(tol_override)
    try:
        return OracleConfig(**fields)
    except LpProjError as exc:
        raise SchemaError(str(exc)) from exc


def parse_request(req, seed_default=0, tol_override=None):
    _require(isinstance(req, dict), "request must be a JSON object")
    command = req.get("command")
    _require(command in _COMMANDS, f"command must be one of {list(_COMMANDS)}")
    p = req.get("p")
    _require(
        isinstance(p, (int, float)) and not isinstance(p, bool) and p > 1,
        "'p' must be a number > 1",
    )
    x = LpVector.of(_as_coords(req.get("x"), "x"), float(p))
    spec = _parse_set(req.get("set"), x.dim)
    direction = None
    raw_dir = req.get("v", req.get("h"))
    if raw_dir is not None:
        coords = _as_coords(raw_dir, "v")
        _require(len(coords) == x.dim, "'v' must have the same dimension as 'x'")
        direction = LpVector.of(coords, float(p))
    if command == "derivative":
        _require(direction is not None, "derivative requests require 'v' (or 'h')")
    flavor = req.get("flavor", "generalized")
    _require(flavor in _FLAVORS, f"flavor must be one of {list(_FLAVORS)}")
    cfg = _parse_oracle(req.get("oracle"), seed_default, tol_override)
    return command, x, spec, direction, flavor, cfg


# ---------------------------------------------------------------------------
# report assembly


def _region_string(spec, region):
    if spec.kind is SetKind.FULL_BALL:
        return "in_ball" if region.tag.value == "in_ball" else "outside"
    return region.tag.value


def _certificate_dict(rep):
    return {
        "min_margin": rep.min_margin,
        "worst_z": list(rep.worst_z.coords),
        "passed": rep.passed,
        "samples": rep.samples,
    }


def run_request(req, seed_default=0, tol_override=None):
    """Execute a parsed request; returns the report dictionary."""
    command, x, spec, direction, flavor, cfg = parse_request(
        req, seed_default, tol_override
    )
    report = {"status": "ok", "result": None, "region": "", "method": "", "diagnostics": {}}

    if command == "project":
        res = project_with_fallback(x, spec, flavor, cfg)
        report["result"] = list(res.point.coords)
        report["region"] = _region_string(spec, res.region)
        report["method"] = res.method
        if res.method == "oracle_fallback":
            report["status"] = "fallback"
        report["diagnostics"] = {
            "norm_x": x.norm,
            "norm_result": res.point.norm,
        }
        return report

    if command == "derivative":
        d = derivative_with_fallback(x, direction, spec, flavor, cfg)
        report["result"] = list(d.vector.coords)
        report["method"] = d.method
        if d.method == "finite_difference":
            report["status"] = "fallback"
            report["diagnostics"]["fd_error_estimate"] = d.fd_error_estimate
        mask = spec.mask_for_dim(x.dim)
        r = spec.r if spec.r is not None else math.inf
        report["region"] = _region_string(spec, classify_region(x, mask, r))
        return report

    if command == "verify":
        res = project_with_fallback(x, spec, flavor, cfg)
        cert = vi_certificate(x, res.point, spec, flavor, cfg)
        oracle = (
            brute_gpi(x, spec, cfg) if flavor == "generalized" else brute_mpi(x, spec, cfg)
        )
        disc = float(np.max(np.abs(oracle.coords - res.point.coords)))
        report["result"] = list(res.point.coords)
        report["region"] = _region_string(spec, res.region)
        report["method"] = res.method
        report["certificate"] = _certificate_dict(cert)
        report["diagnostics"] = {
            "oracle_discrepancy": disc,
            "certificate_min_margin": cert.min_margin,
        }
        if res.method == "oracle_fallback":
            report["status"] = "fallback"
        return report

    # compare: generalized vs metric, projections and (optionally) derivatives
    res_g = project_with_fallback(x, spec, "generalized", cfg)
    res_m = project_with_fallback(x, spec, "metric", cfg)
    disc = float(np.max(np.abs(res_g.point.coords - res_m.point.coords)))
    report["result"] = list(res_g.point.coords)
    report["region"] = _region_string(spec, res_g.region)
    report["method"] = f"{res_g.method}/{res_m.method}"
    report["vectors"] = {
        "generalized": list(res_g.point.coords),
        "metric": list(res_m.point.coords),
    }
    report["diagnostics"] = {"projection_discrepancy": disc}
    if direction is not None:
        d_g = derivative_with_fallback(x, direction, spec, "generalized", cfg)
        d_m = derivative_with_fallback(x, direction, spec, "metric", cfg)
        report["vectors"]["generalized_derivative"] = list(d_g.vector.coords)
        report["vectors"]["metric_derivative"] = list(d_m.vector.coords)
        report["diagnostics"]["derivative_discrepancy"] = float(
            np.max(np.abs(d_g.vector.coords - d_m.vector.coords))
        )
    if "oracle_fallback" in report["method"]:
        report["status"] = "fallback"
    return report


# ---------------------------------------------------------------------------
# entry point


def _error_report(exc):
    return {
        "status": "error",
        "error": {"code": exc.code, "message": str(exc)},
    }


def _cmd_run(args):
    if args.input == "-":
        raw = sys.stdin.read()
    else:
        with open(args.input, "r", encoding="utf-8") as fh:
            raw = fh.read()
    try:
        req = json.loads(raw)
    except json.JSONDecodeError as exc:
        print(dumps_report(_error_report(SchemaError(f"invalid JSON: {exc}")), args.pretty))
        return 2
    try:
        report = run_request(req, seed_default=args.seed, tol_override=args.tol_override)
    except SchemaError as exc:
        print(dumps_report(_error_report(exc), args.pretty))
        return 2
    except LpProjError as exc:
        print(dumps_report(_error_report(exc), args.pretty))
        return 1
    print(dumps_report(report, args.pretty))
    return 0


def _cmd_suite(args):
    try:
        rep = run_suite(args.name, seed=args.seed)
    except SchemaError as exc:
        print(dumps_report(_error_report(exc), args.pretty))
        return 2
    print(dumps_report(rep.as_dict(), args.pretty))
    return 0 if rep.passed else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lpproj",
        description="Metric and generalized metric projections in finite l_p spaces",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    run_p = sub.add_parser("run", help="execute a JSON request")
    run_p.add_argument(
        "--input", required=True, help="request file, or '-' to read stdin"
    )
    run_p.add_argument("--pretty", action="store_true", help="indent the JSON report")
    run_p.add_argument("--seed", type=int, default=0, help="default oracle seed")
    run_p.add_argument(
        "--tol-override", type=float, default=None, help="override the oracle tol_opt"
    )
    run_p.set_defaults(func=_cmd_run)

    suite_p = sub.add_parser("suite", help="run a property suite")
    suite_p.add_argument(
        "name", help="invariants, oracle_equivalence, or all"
    )
    suite_p.add_argument("--seed", type=int, default=0)
    suite_p.add_argument("--pretty", action="store_true")
    suite_p.set_defaults(func=_cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
