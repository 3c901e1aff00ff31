"""CLI request handling, serialization, and exit codes."""

import json

import numpy as np
import pytest

from lpproj.cli import dumps_report, main, run_request
from lpproj.errors import SchemaError

from conftest import assert_close


def _run(capsys, args):
    code = main(args)
    out = capsys.readouterr().out
    return code, json.loads(out)


def _write(tmp_path, payload):
    path = tmp_path / "req.json"
    path.write_text(json.dumps(payload))
    return str(path)


def test_project_full_ball(tmp_path, capsys):
    req = {
        "command": "project",
        "p": 2,
        "x": [3, 4],
        "set": {"kind": "full_ball", "r": 1},
        "flavor": "generalized",
    }
    code, rep = _run(capsys, ["run", "--input", _write(tmp_path, req)])
    assert code == 0
    assert rep["status"] == "ok"
    assert rep["region"] == "outside"
    assert_close(rep["result"], [0.6, 0.8], tol=1e-12)


def test_compare_masked_ball(tmp_path, capsys):
    req = {
        "command": "compare",
        "p": 3,
        "x": [1.2, 10],
        "set": {"kind": "masked_ball", "mask": [0], "r": 1},
    }
    code, rep = _run(capsys, ["run", "--input", _write(tmp_path, req)])
    assert code == 0
    assert_close(rep["vectors"]["generalized"], [0.14391715142325145, 0.0], tol=1e-12)
    assert_close(rep["vectors"]["metric"], [1.0, 0.0], tol=1e-12)
    assert rep["diagnostics"]["projection_discrepancy"] == pytest.approx(
        0.85608284857674855, abs=1e-12
    )


def test_derivative_cylinder(tmp_path, capsys):
    req = {
        "command": "derivative",
        "p": 2,
        "x": [2, 2, 3],
        "v": [1, 0, 5],
        "set": {"kind": "cylinder", "mask": [0, 1], "r": 1},
        "flavor": "metric",
    }
    code, rep = _run(capsys, ["run", "--input", _write(tmp_path, req)])
    assert code == 0
    assert rep["method"] == "closed_form"
    assert_close(
        rep["result"],
        [0.17677669529663687, -0.17677669529663684, 5.0],
        tol=1e-12,
    )


def test_verify_reports_certificate(tmp_path, capsys):
    req = {
        "command": "verify",
        "p": 3,
        "x": [2, 3],
        "set": {"kind": "masked_ball", "mask": [0], "r": 1},
        "flavor": "metric",
    }
    code, rep = _run(capsys, ["run", "--input", _write(tmp_path, req)])
    assert code == 0
    assert rep["certificate"]["passed"] is True
    assert rep["diagnostics"]["oracle_discrepancy"] <= 1e-6


def test_fallback_status_for_inadmissible_cylinder(tmp_path, capsys):
    req = {
        "command": "project",
        "p": 3,
        "x": [5, 0.1],
        "set": {"kind": "cylinder", "mask": [0], "r": 1},
        "flavor": "generalized",
    }
    code, rep = _run(capsys, ["run", "--input", _write(tmp_path, req)])
    assert code == 0
    assert rep["status"] == "fallback"
    assert rep["method"] == "oracle_fallback"


def test_schema_errors_exit_2(tmp_path, capsys):
    bad = [
        {"command": "nope", "p": 2, "x": [1], "set": {"kind": "full_ball", "r": 1}},
        {"command": "project", "p": 0.5, "x": [1], "set": {"kind": "full_ball", "r": 1}},
        {"command": "project", "p": 2, "x": [], "set": {"kind": "full_ball", "r": 1}},
        {"command": "project", "p": 2, "x": [1], "set": {"kind": "full_ball"}},
        {"command": "project", "p": 2, "x": [1, 2], "set": {"kind": "masked_ball", "mask": [7], "r": 1}},
        {"command": "derivative", "p": 2, "x": [1, 2], "set": {"kind": "full_ball", "r": 1}},
        {"command": "project", "p": 2, "x": [1], "set": {"kind": "subspace", "mask": [0], "r": 1}},
    ]
    for req in bad:
        code, rep = _run(capsys, ["run", "--input", _write(tmp_path, req)])
        assert code == 2, req
        assert rep["status"] == "error"
        assert rep["error"]["code"] == "schema_error"


def test_invalid_json_exit_2(tmp_path, capsys):
    path = tmp_path / "req.json"
    path.write_text("{not json")
    code, rep = _run(capsys, ["run", "--input", str(path)])
    assert code == 2


def test_computation_error_exit_1(tmp_path, capsys):
    # brute oracle refuses dimension > 8; surfaces as a computation error
    req = {
        "command": "verify",
        "p": 2,
        "x": [1.0] * 9,
        "set": {"kind": "full_ball", "r": 0.5},
        "flavor": "generalized",
    }
    code, rep = _run(capsys, ["run", "--input", _write(tmp_path, req)])
    assert code == 1
    assert rep["status"] == "error"


def test_report_round_trip_and_float_precision():
    req = {
        "command": "project",
        "p": 3,
        "x": [1, 2],
        "set": {"kind": "full_ball", "r": 1},
        "flavor": "generalized",
    }
    rep = run_request(req)
    for pretty in (False, True):
        text = dumps_report(rep, pretty=pretty)
        parsed = json.loads(text)
        assert parsed == rep
    # 17 significant digits round-trip bit-exactly
    value = rep["result"][0]
    assert float(format(value, ".17g")) == value


def test_determinism_bit_identical():
    req = {
        "command": "verify",
        "p": 2.5,
        "x": [1.3, -0.4, 2.0],
        "set": {"kind": "masked_ball", "mask": [0, 2], "r": 1},
        "flavor": "generalized",
        "oracle": {"rng_seed": 42},
    }
    a = dumps_report(run_request(req))
    b = dumps_report(run_request(req))
    assert a == b


def test_seed_flag_precedence():
    req = {
        "command": "verify",
        "p": 2,
        "x": [3, 4],
        "set": {"kind": "full_ball", "r": 1},
        "flavor": "metric",
    }
    a = run_request(req, seed_default=1)
    b = run_request(req, seed_default=2)
    req["oracle"] = {"rng_seed": 7}
    c = run_request(req, seed_default=1)
    d = run_request(req, seed_default=2)
    assert dumps_report(c) == dumps_report(d)  # explicit seed wins
    assert a["certificate"]["samples"] == b["certificate"]["samples"]


def test_unknown_suite_exit_2(capsys):
    code, rep = _run(capsys, ["suite", "bogus"])
    assert code == 2
    assert rep["error"]["code"] == "schema_error"


def test_oracle_overrides_schema():
    req = {
        "command": "project",
        "p": 2,
        "x": [3, 4],
        "set": {"kind": "full_ball", "r": 1},
        "oracle": {"bad_option": 1},
    }
    with pytest.raises(SchemaError):
        run_request(req)
