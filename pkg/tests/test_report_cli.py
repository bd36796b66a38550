import json

import numpy as np
import pytest

from hkt import __version__
from hkt.catalog import CATALOG, SuiteConfig, UsageError, list_examples, run_checks
from hkt.cli import CONFIG_ENV, build_config, main, make_report, parse_grid, read_config, sweep
from hkt.exact import Exact
from hkt.report import CheckReport, CheckResult, exact_check, flag, lower_bound, numeric


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- check results ---------------------------------------------------------------
def test_check_constructors():
    assert numeric("a", 1e-12, 1e-10).passed
    assert not numeric("a", 1e-9, 1e-10).passed
    assert exact_check("b", 0).passed and not exact_check("b", Exact(1, 0, 1)).passed
    assert flag("c", True).residual == 0 and flag("c", False).residual == 1
    lb = lower_bound("d", 0.3, 0.0)
    assert lb.passed and lb.kind == "lower"


def test_negative_control_matches_when_failing():
    c = numeric("x", 1.0, 1e-6, expect="fail")
    assert not c.passed and c.matches
    assert not numeric("x", 0.0, 1e-6, expect="fail").matches


def test_report_json_round_trip():
    checks = [
        numeric("z", 1.2345678901234567e-11, 1e-9, np.array([0.1, 0.2])),
        exact_check("a", Exact(0, Exact.sqrt(3).b, d=3)),
        flag("m", True, witness="8"),
        lower_bound("l", 0.25, 0.0),
    ]
    rep = CheckReport("demo", checks, seed=3, samples=7, version="x", params={"b": 1, "a": 2})
    text = rep.to_json()
    again = CheckReport.from_json(text)
    assert again == rep
    assert again.to_json() == text
    data = json.loads(text)
    assert [c["name"] for c in data["checks"]] == ["a", "l", "m", "z"]
    assert data["checks"][3]["residual"] == "1.2345678901234567e-11"
    assert data["checks"][0]["residual"] == "1*sqrt(3)"


def test_max_residual_ignores_lower_bounds_and_controls():
    rep = CheckReport("x", [
        numeric("a", 1e-12, 1e-9),
        lower_bound("b", 5.0, 0.0),
        numeric("c", 3.0, 1e-9, expect="fail"),
        exact_check("d", 0),
    ])
    assert rep.max_residual() == 1e-12
    assert rep.verdict


def test_text_format_marks_mismatch():
    rep = CheckReport("x", [numeric("a", 1.0, 1e-9), numeric("b", 1.0, 1e-9, expect="fail")])
    text = rep.to_text()
    assert "MISMATCH" in text and "expected to fail" in text and text.endswith("verdict: FAIL\n")


# -- catalog -----------------------------------------------------------------------
def test_catalog_ids():
    ids = list_examples()
    assert len(ids) == 14 and len(set(ids)) == 14
    for required in ("flat-hk-n2", "flat-hk-n3", "hopf-log-n2", "hopf-log-n3", "conformal-4d", "conformal-8d",
                     "heisenberg-n1", "heisenberg-n2", "su2-group", "su3-group", "su3-reduction"):
        assert required in ids
    assert CATALOG["conformal-8d"].negative_control


def test_run_checks_requires_seed_and_samples():
    with pytest.raises(UsageError, match="seed"):
        run_checks(SuiteConfig("flat-hk-n1"))
    with pytest.raises(UsageError, match="positive"):
        run_checks(SuiteConfig("flat-hk-n1", samples=0, seed=1))
    with pytest.raises(UsageError, match="unknown"):
        run_checks(SuiteConfig("nope", seed=1))


@pytest.mark.parametrize("ex", ["flat-hk-n1", "flat-hk-n2", "hopf-log-n2", "hopf-power-m2", "conformal-4d", "conformal-8d", "su2-group", "su3-reduction"])
def test_catalog_entries_meet_expectations(ex):
    rep = make_report(SuiteConfig(ex, samples=5, seed=0))
    assert rep.verdict, rep.to_text()


def test_negative_control_really_fails():
    rep = make_report(SuiteConfig("conformal-8d", samples=5, seed=0))
    controls = [c for c in rep.checks if c.expect == "fail"]
    assert {c.name for c in controls} == {"hkt_torsion_equality", "hkt_holomorphic_form"}
    assert all(not c.passed and float(c.residual) > 1e-3 for c in controls)


# -- command line ---------------------------------------------------------------------
def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    assert out.count("\n") == 14 and "negative control" in out


def test_version(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0 and out.strip() == __version__


def test_verify_json_deterministic(capsys):
    code, a, _ = run(capsys, "verify", "flat-hk-n1", "--seed", "4", "--samples", "6", "--format", "json")
    assert code == 0
    _, b, _ = run(capsys, "verify", "flat-hk-n1", "--seed", "4", "--samples", "6", "--format", "json")
    assert a == b
    rep = CheckReport.from_json(a)
    assert rep.seed == 4 and rep.samples == 6 and rep.verdict and rep.version == __version__
    _, c, _ = run(capsys, "verify", "flat-hk-n1", "--seed", "5", "--samples", "6", "--format", "json")
    assert c != a


def test_exact_example_has_no_seed(capsys):
    code, out, _ = run(capsys, "verify", "su2-group", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["seed"] is None and data["samples"] is None
    assert all(c["residual"] == "0" for c in data["checks"] if c["exact"] and c["passed"])


@pytest.mark.parametrize("argv", [
    ["verify", "no-such-example", "--seed", "1"],
    ["verify", "flat-hk-n1"],
    ["verify", "flat-hk-n1", "--seed", "1", "--samples", "0"],
    ["frobnicate"],
    ["sweep", "flat-hk-n1", "--seed", "1"],
    ["sweep", "flat-hk-n1", "--seed", "1", "--grid", "colour=red"],
    ["sweep", "hopf-log-n2", "--seed", "1", "--grid", "theta3=0"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_tolerance_override_produces_mismatch(capsys):
    code, out, _ = run(capsys, "verify", "hopf-log-n2", "--seed", "1", "--samples", "3", "--tolerance", "1e-30")
    assert code == 1 and "MISMATCH" in out


def test_out_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "flat-hk-n1", "--seed", "1", "--samples", "2", "--format", "json", "--out", str(target))
    assert code == 0 and out == ""
    assert CheckReport.from_json(target.read_text()).example == "flat-hk-n1"


# -- config file -----------------------------------------------------------------------
def test_config_file_and_precedence(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "hkt.conf"
    cfg.write_text("# defaults\nseed = 11\nsamples = 4\nformat = json\n")
    code, out, _ = run(capsys, "--config", str(cfg), "verify", "flat-hk-n1")
    assert code == 0
    data = json.loads(out)
    assert data["seed"] == 11 and data["samples"] == 4
    _, out, _ = run(capsys, "--config", str(cfg), "verify", "flat-hk-n1", "--samples", "2")
    assert json.loads(out)["samples"] == 2
    monkeypatch.setenv(CONFIG_ENV, str(cfg))
    _, out, _ = run(capsys, "verify", "flat-hk-n1")
    assert json.loads(out)["seed"] == 11


@pytest.mark.parametrize("body,match", [("seed 3\n", "key = value"), ("colour = red\n", "unknown key"), ("samples = many\n", "bad value")])
def test_bad_config(tmp_path, body, match):
    path = tmp_path / "bad.conf"
    path.write_text(body)
    with pytest.raises(UsageError, match=match):
        read_config(str(path))


def test_bad_config_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.conf"
    path.write_text("format = yaml\n")
    code, _, err = run(capsys, "--config", str(path), "verify", "flat-hk-n1", "--seed", "1")
    assert code == 2 and "format" in err
    code, _, _ = run(capsys, "--config", str(tmp_path / "missing.conf"), "verify", "flat-hk-n1", "--seed", "1")
    assert code == 2


# -- sweeps ---------------------------------------------------------------------------
def test_parse_grid_is_cartesian():
    grid = parse_grid(["r=0.3,0.5", "theta1=0,1,2"])
    assert len(grid) == 6 and grid[0] == {"r": "0.3", "theta1": "0"}


def test_singleton_sweep_equals_verify():
    cfg = build_config("hopf-log-n2", {}, {"seed": 2, "samples": 4})
    res = sweep(cfg, parse_grid(["r=0.5"]))
    assert res["reports"][0] == make_report(cfg).to_dict()


def test_sweep_summary_dominates_points(capsys):
    code, out, _ = run(capsys, "sweep", "hopf-log-n2", "--seed", "3", "--samples", "3",
                       "--grid", "r=0.3,0.7", "--grid", "theta2=0,1.5", "--format", "json")
    assert code == 0
    res = json.loads(out)
    assert res["summary"]["points"] == 4 and res["summary"]["verdict"]
    worst = float(res["summary"]["max_residual"])
    for rep in res["reports"]:
        assert CheckReport.from_json(json.dumps(rep)).max_residual() <= worst
    assert [g["theta2"] for g in res["grid"]] == ["0", "1.5", "0", "1.5"]
