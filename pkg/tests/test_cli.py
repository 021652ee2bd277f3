"""
Tests for the command-line front end: subcommands, JSON output and exit codes.
"""

import json
import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from disc_tc import config
from disc_tc.cli import RunConfig, build_parser, main

QUADRIC = {"dim": 3, "terms": [{"exp": [2, 0, 0], "re": 1}, {"exp": [0, 1, 1], "re": -1}]}
DISC_F_3 = {
    "dim": 2,
    "terms": [
        {"exp": [3, 0], "re": 2},
        {"exp": [2, 1], "re": 3},
        {"exp": [1, 2], "re": -3},
        {"exp": [0, 3], "re": -2},
    ],
}


@pytest.fixture
def write_json(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
        return str(path)

    return write


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_parser_knows_every_subcommand():
    parser = build_parser()
    extra = {"bound": ["--xi", "xi.json"], "discriminants": ["--n", "2"], "catalog": ["--n", "2"]}
    for command in ("homog", "bound", "verify-hessian", "discriminants", "plan", "catalog"):
        args = parser.parse_args([command] + extra.get(command, []))
        assert args.command == command
    assert parser.parse_args(["verify-hessian"]).samples == 1000


def test_homog(write_json, capsys):
    code, out = run(["homog", "--input", write_json("q.json", QUADRIC)], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["rank"] == 2
    assert payload["dim"] == 3


def test_malformed_json_is_a_parse_error(write_json, capsys):
    code, out = run(["homog", "--input", write_json("bad.json", '{"dim": 3,')], capsys)
    assert code == 2
    assert out == ""


def test_missing_input_is_a_parse_error(capsys):
    code, _ = run(["homog"], capsys)
    assert code == 2


def test_invalid_action_row_is_a_validation_error(write_json, capsys):
    argv = ["bound", "--input", write_json("q.json", QUADRIC), "--xi", write_json("xi.json", [[1, 0, 0]])]
    code, _ = run(argv, capsys)
    assert code == 3


def test_bound_for_three_ordered_points(write_json, capsys):
    argv = ["bound", "--input", write_json("f3.json", DISC_F_3), "--xi", write_json("xi.json", [[1, 1]])]
    code, out = run(argv, capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["bound"] == 3
    assert payload["t"] == 0


def test_empty_action_gives_twice_the_dimension(write_json, capsys):
    argv = ["bound", "--input", write_json("q.json", QUADRIC), "--xi", write_json("xi.json", {"xi": []})]
    code, out = run(argv, capsys)
    assert code == 0
    assert json.loads(out)["bound"] == 6


def test_verify_hessian_without_samples(write_json, capsys):
    code, out = run(["verify-hessian", "--input", write_json("q.json", QUADRIC), "--samples", "0"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["records"] == []
    assert payload["summary"]["violations"] == 0


def test_verify_hessian_is_reproducible(write_json, capsys, tmp_path):
    path = write_json("q.json", QUADRIC)
    argv = ["verify-hessian", "--input", path, "--samples", "20", "--seed", "7"]
    _, first = run(argv + ["--out", str(tmp_path / "a.json")], capsys)
    _, second = run(argv, capsys)
    assert first == second
    assert (tmp_path / "a.json").read_text() == first


def test_discriminants(capsys):
    code, out = run(["discriminants", "--n", "3"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["expected"] == 3
    assert payload["routes"]["ordered"]["bound"] == 3
    assert payload["routes"]["unordered"]["bound"] == 3


def test_plan_two_points(write_json, capsys):
    request = {
        "start": {"n": 2, "points": [[1, 0], [-1, 0]]},
        "end": {"n": 2, "points": [[0, 1], [0, -1]]},
    }
    code, out = run(["plan", "--input", write_json("plan.json", request)], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["n"] == 2
    assert payload["min_margin"] >= 1.0
    assert payload["metadata"]["connection"] == "rotation"


def test_plan_beyond_the_catalog_is_a_validation_error(write_json, capsys):
    points = [[k, k * k] for k in range(5)]
    request = {"start": {"points": points}, "end": {"points": points[::-1]}}
    code, _ = run(["plan", "--input", write_json("plan.json", request)], capsys)
    assert code == 3


def test_plan_request_needs_both_ends(write_json, capsys):
    request = {"start": {"points": [[1, 0], [-1, 0]]}}
    code, _ = run(["plan", "--input", write_json("plan.json", request)], capsys)
    assert code == 2


def test_catalog(capsys):
    code, out = run(["catalog", "--n", "2"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert len(payload["entries"]) == 1


def test_run_config_carries_the_tolerances():
    parser = build_parser()
    run_config = RunConfig.from_args(parser.parse_args(["verify-hessian"]))
    assert run_config.fd_tol == config.FD_TOL
    assert run_config.null_tol == config.NULL_TOL
    args = parser.parse_args(["verify-hessian", "--fd-tol", "1e-3", "--grad-tol", "1e-6"])
    run_config = RunConfig.from_args(args)
    assert run_config.fd_tol == 1e-3
    assert run_config.grad_tol == 1e-6


def test_verify_hessian_checks_finite_differences(write_json, capsys):
    path = write_json("q.json", QUADRIC)
    code, out = run(["verify-hessian", "--input", path, "--samples", "20", "--seed", "3"], capsys)
    assert code == 0
    summary = json.loads(out)["summary"]
    assert summary["max_fd_error_g"] < config.FD_TOL
    assert summary["fd_violations"] == 0
    _, out = run(["verify-hessian", "--input", path, "--samples", "20", "--seed", "3", "--fd-tol", "0"], capsys)
    summary = json.loads(out)["summary"]
    assert summary["fd_violations"] == summary["samples"] == 20


def test_plan_svg_without_matplotlib_is_a_validation_error(write_json, capsys, tmp_path, monkeypatch):
    monkeypatch.setitem(sys.modules, "matplotlib", None)
    request = {
        "start": {"n": 2, "points": [[1, 0], [-1, 0]]},
        "end": {"n": 2, "points": [[0, 1], [0, -1]]},
    }
    svg = tmp_path / "trail.svg"
    code, out = run(["plan", "--input", write_json("plan.json", request), "--svg", str(svg)], capsys)
    assert code == 3
    assert out == ""
    assert not svg.exists()
