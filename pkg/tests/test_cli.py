import csv
import io
import json
import subprocess
import sys

import pytest

from cantordyn import fixtures
from cantordyn.cli import DOMAIN, OK, USAGE, main
from cantordyn.spec_model import load_map_spec, validate


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


AIRPLANE = fixtures.path("airplane_folding.spec")


def test_validate(capsys):
    assert run(capsys, "validate", AIRPLANE)[0] == OK
    code, out, _ = run(capsys, "validate", fixtures.path("broken.spec"))
    assert code == DOMAIN and "error" in out
    assert run(capsys, "validate", "/nonexistent/x.spec")[0] == USAGE


def test_usage_errors(capsys):
    assert run(capsys)[0] == USAGE
    assert run(capsys, "simulate", AIRPLANE, "--shrink", "3/2")[0] == USAGE
    assert run(capsys, "simulate", AIRPLANE, "--depth", "-1")[0] == USAGE
    assert run(capsys, "analyze", AIRPLANE, "--bracket-width", "abc")[0] == USAGE
    assert run(capsys, "folding", "plan", "--deg-g", "2", "--degree", "23")[0] == USAGE


def test_analyze_lines(capsys):
    code, out, _ = run(capsys, "analyze", AIRPLANE, "--gamma", "gamma0")
    assert code == OK and out.strip() == "OBSTRUCTION λ=1"
    assert run(capsys, "analyze", AIRPLANE, "--gamma", "gamma0", "--require-no-obstruction")[0] == DOMAIN
    code, out, _ = run(capsys, "analyze", AIRPLANE, "--gamma", "beta")
    assert code == OK and out.strip() == "λ=1/2, Cantor"
    code, out, _ = run(capsys, "analyze", fixtures.path("mating_equator.spec"))
    assert "not Cantor" in out
    assert run(capsys, "analyze", AIRPLANE, "--gamma", "nope")[0] == DOMAIN


def test_analyze_report_file(capsys, tmp_path):
    assert run(capsys, "analyze", AIRPLANE, "--gamma", "gamma0", "--out", tmp_path, "--format", "report", "--format", "csv")[0] == OK
    doc = json.loads((tmp_path / "analysis.json").read_text())
    assert doc["thurston_obstruction"] is True
    assert (tmp_path / "kappa.csv").read_text().startswith("n,gamma0\n0,1\n")


def test_simulate_airplane_rows(capsys):
    code, out, _ = run(capsys, "simulate", AIRPLANE, "--depth", "3")
    assert code == OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8


def test_simulate_two_children(capsys):
    code, out, _ = run(capsys, "simulate", fixtures.path("two_children.spec"), "--depth", "2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["lo"], r["hi"]) for r in rows] == [("0", "4/25"), ("6/25", "2/5"), ("3/5", "19/25"), ("21/25", "1")]


def test_simulate_periodic_omega(capsys, tmp_path):
    code, out, _ = run(
        capsys, "simulate", fixtures.path("two_children.spec"), "--depth", "3",
        "--itinerary", "1,1/0", "--horizon", "64", "--out", tmp_path, "--format", "report",
    )
    assert code == OK and "omega: 1 distinct" in out
    doc = json.loads((tmp_path / "simulate.json").read_text())
    assert doc["itinerary"]["class"] == "pre-periodic"
    assert doc["itinerary"]["omega_addresses"] == ["0.0.0"]
    assert run(capsys, "simulate", AIRPLANE, "--itinerary", "x/y")[0] == USAGE


def test_tower_airplane(capsys, tmp_path):
    code, out, _ = run(capsys, "tower", AIRPLANE, "--depth", "3", "--out", tmp_path)
    assert code == OK
    assert "complex=2 every depth" in out
    assert sorted(p.name for p in tmp_path.glob("T*.dot")) == ["T0.dot", "T1.dot", "T2.dot", "T3.dot"]
    doc = json.loads((tmp_path / "census.json").read_text())
    assert doc["edge_counts"] == [1, 2, 4, 8]


def test_tower_depth_zero_and_m4(capsys, tmp_path):
    assert run(capsys, "tower", AIRPLANE, "--depth", "0", "--out", tmp_path / "a")[0] == OK
    assert [p.name for p in (tmp_path / "a").glob("T*.dot")] == ["T0.dot"]
    code, out, _ = run(capsys, "tower", fixtures.path("apply2_deg2.spec"), "--depth", "3", "--format", "report")
    assert "edges=1,4,16,64" in out


def test_folding_plan_check_emit(capsys, tmp_path):
    plan = tmp_path / "p.plan"
    assert run(capsys, "folding", "plan", "--apply2", "--deg-g", "2", "--degree", "23", "--out", plan)[0] == OK
    assert json.loads(plan.read_text())["degrees"] == [2, 7, 7, 7]
    assert run(capsys, "folding", "plan", "--apply2", "--deg-g", "2", "--degree", "20")[0] == DOMAIN

    code, out, _ = run(capsys, "folding", "check", fixtures.path("airplane.plan"), "--spec", AIRPLANE)
    assert code == OK
    assert "thm_no1: inapplicable" in out and "obstruction: gamma0" in out
    code, _, _ = run(
        capsys, "folding", "check", fixtures.path("airplane.plan"), "--spec", AIRPLANE, "--require-no-obstruction"
    )
    assert code == DOMAIN

    spec_path = tmp_path / "emitted.spec"
    assert run(capsys, "folding", "emit", plan, "--out", spec_path)[0] == OK
    spec = load_map_spec(spec_path)
    assert validate(spec).ok and spec.degree == 23
    assert run(capsys, "folding", "emit", tmp_path / "missing.plan")[0] == USAGE


def test_outputs_are_byte_stable(capsys, tmp_path):
    for d in ("a", "b"):
        assert run(capsys, "tower", AIRPLANE, "--depth", "2", "--out", tmp_path / d, "--format", "dot",
                   "--format", "svg", "--format", "csv", "--format", "report")[0] == OK
        assert run(capsys, "simulate", AIRPLANE, "--depth", "3", "--out", tmp_path / d, "--format", "csv",
                   "--format", "svg", "--format", "report", "--itinerary", "thue-morse", "--horizon", "256")[0] == OK
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
    assert not [n for n in names if n.startswith(".")]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cantordyn.cli", "validate", str(AIRPLANE)], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "valid" in proc.stdout
