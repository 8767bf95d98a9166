import csv
import io
import json
import math
import subprocess
import sys

import pytest

from hermite_quad.cli import main
from hermite_quad.rule_builder import build_plan
from hermite_quad.hermite_space import make_space
from hermite_quad.wce import product_gh_wce

FLAT1 = {"s": 1, "omega": 0.5, "a": {"kind": "power", "alpha": 1, "gamma": 0}, "b": {"kind": "power", "alpha": 1, "gamma": 0}}
FLAT2 = dict(FLAT1, s=2)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_nodes(capsys):
    code, out, _ = run(capsys, "nodes", "1")
    assert code == 0 and json.loads(out) == {"order": 1, "nodes": [0.0], "weights": [1.0]}
    code, out, _ = run(capsys, "nodes", "2")
    d = json.loads(out)
    assert d["nodes"] == pytest.approx([-1, 1], abs=1e-15) and d["weights"] == pytest.approx([0.5, 0.5])


def test_nodes_usage_error(capsys):
    assert run(capsys, "nodes", "0")[0] == 2
    assert run(capsys, "nodes")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_nodes_csv_round_trip(capsys):
    from hermite_quad.gauss_hermite import gh_rule

    _, out, _ = run(capsys, "nodes", "9", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    r = gh_rule(9)
    assert [float(row["node"]) for row in rows] == list(r.nodes)
    assert [float(row["weight"]) for row in rows] == list(r.weights)


def test_wce_examples(capsys, space_file):
    path = space_file(FLAT1)
    _, out, _ = run(capsys, "wce", "--space", path, "--m", "1")
    assert json.loads(out)["e_squared"] == pytest.approx(2 / math.sqrt(3) - 1, abs=1e-12)
    _, out, _ = run(capsys, "wce", "--space", space_file(FLAT2), "--m", "1,1")
    assert json.loads(out)["e_squared"] == pytest.approx(1 / 3, abs=1e-12)
    _, out, _ = run(capsys, "wce", "--space", space_file(FLAT2), "--m", "2", "--method", "general", "--tol", "1e-12")
    d = json.loads(out)
    assert d["m"] == [2, 2] and d["method"] == "general"
    assert d["e_squared"] == pytest.approx(product_gh_wce(make_space(1, 1, 0.5, s=2), (2, 2)).e_squared, abs=4e-12)


def test_wce_bad_space(capsys, tmp_path):
    assert run(capsys, "wce", "--space", str(tmp_path / "missing.json"), "--m", "1")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "wce", "--space", str(bad), "--m", "1")[0] == 2
    assert run(capsys, "wce", "--space", json.dumps(dict(FLAT1, omega=1.5)), "--m", "1")[0] == 2


def test_plan(capsys, space_file):
    _, out, _ = run(capsys, "plan", "--space", space_file(FLAT1), "--scheme", "uexp", "--eps", "0.1")
    d = json.loads(out)
    assert d["m"] == [10] and d["n_total"] == 10 and d["measured_e"] <= 0.1


def test_plan_ecwt(capsys, space_file):
    code, out, _ = run(capsys, "plan", "--space", space_file(FLAT1), "--scheme", "ecwt", "--eps", "0.1", "--A", "0.5")
    assert code == 0 and json.loads(out)["inputs"]["A"] == 0.5
    # explicit/generator space with no way to derive A
    code, _, err = run(capsys, "plan", "--space", space_file(FLAT1), "--scheme", "ecwt", "--eps", "0.1")
    assert code == 2 and "A" in err


def test_plan_certification_failure_exit_code(capsys, space_file):
    code, _, _ = run(
        capsys, "plan", "--space", space_file(dict(FLAT1, s=3)), "--scheme", "ecwt", "--eps", "0.001", "--A", "0.75"
    )
    assert code == 3


def test_sweep_eps_matches_plans(capsys, space_file, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, _, _ = run(
        capsys, "sweep", "--space", space_file(FLAT2), "--scheme", "ecspt", "--eps", "0.1,0.01,0.001", "--out", str(out_path)
    )
    assert code == 0
    rows = list(csv.DictReader(out_path.open()))
    assert list(rows[0]) == ["s", "epsilon_or_n", "m1", "m2", "n_total", "e_measured", "e_bound", "lower_bound", "p_hat"]
    sp = make_space(1, 1, 0.5, s=2)
    for row, eps in zip(rows, (0.1, 0.01, 0.001)):
        plan = build_plan(sp, "ecspt", eps)
        assert float(row["epsilon_or_n"]) == eps
        assert (int(row["m1"]), int(row["m2"])) == plan.m
        # bit-exact round trip
        assert float(row["e_measured"]) == plan.measured_e
        assert float(row["e_bound"]) == plan.guaranteed_e
        assert 0 <= float(row["lower_bound"]) <= float(row["e_measured"])


def test_sweep_n_grid_rate(capsys, space_file):
    grid = ",".join(str(n) for n in range(1, 31))
    code, out, _ = run(capsys, "sweep", "--space", space_file(FLAT1), "--n", grid)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 30
    assert abs(float(rows[0]["p_hat"]) - 1.0) <= 0.2
    assert float(rows[0]["e_measured"]) == pytest.approx(math.sqrt(2 / math.sqrt(3) - 1), rel=1e-12)


def test_sweep_json(capsys, space_file):
    _, out, _ = run(capsys, "sweep", "--space", space_file(FLAT1), "--n", "1,2", "--format", "json")
    rows = json.loads(out)
    assert rows[1]["m"] == [2] and rows[1]["p_hat"] is None


def test_sweep_validation(capsys, space_file):
    path = space_file(FLAT1)
    assert run(capsys, "sweep", "--space", path, "--n", "")[0] == 2
    assert run(capsys, "sweep", "--space", path, "--n", "3,2")[0] == 2
    assert run(capsys, "sweep", "--space", path, "--eps", "0.1")[0] == 2  # missing scheme
    assert run(capsys, "sweep", "--space", path, "--scheme", "uexp", "--eps", "0.01,0.1")[0] == 2
    assert run(capsys, "sweep", "--space", path)[0] == 2


def test_integrate_ridge_function(capsys, space_file):
    code, out, _ = run(capsys, "integrate", "--space", space_file(FLAT2), "--scheme", "uexp", "--eps", "0.01", "--function", "appendixB")
    d = json.loads(out)
    assert code == 0
    assert d["exact"] == pytest.approx(math.exp(0.5), rel=1e-15)
    assert d["error"] <= d["certified_bound"]
    assert d["norm"] == pytest.approx(math.exp(1.5), rel=1e-14)


def test_integrate_hermite(capsys, space_file):
    from hermite_quad.gauss_hermite import apply_rule, gh_rule
    from hermite_quad.hermite import hermite_eval

    _, out, _ = run(capsys, "integrate", "--space", space_file(FLAT1), "--m", "3", "--function", "hermite:6")
    d = json.loads(out)
    direct = abs(apply_rule(gh_rule(3), lambda x: hermite_eval(6, x)))
    assert d["error"] == pytest.approx(direct, rel=1e-14)
    assert d["error"] <= d["certified_bound"]


def test_integrate_unknown_function(capsys, space_file):
    assert run(capsys, "integrate", "--space", space_file(FLAT1), "--m", "3", "--function", "foo")[0] == 2


def test_lower_bound(capsys, space_file):
    _, out, _ = run(capsys, "lower-bound", "--space", space_file(FLAT1), "--t", "1")
    assert json.loads(out)["bound"] == pytest.approx(1 / 128, rel=1e-14)
    _, out, _ = run(capsys, "lower-bound", "--space", space_file(FLAT2), "--n", "3", "--t-cap", "4")
    assert json.loads(out)["t"] == [1, 1]
    assert run(capsys, "lower-bound", "--space", space_file(FLAT1), "--n", "50", "--t-cap", "5")[0] == 2


def test_regime(capsys, space_file):
    _, out, _ = run(capsys, "regime", "--space", space_file(dict(FLAT1, s=3)))
    d = json.loads(out)
    assert d["B_s"] == 3.0 and d["p_star_s"] == pytest.approx(1 / 3)
    assert d["ecwt_necessity"]["bounded"] == "yes"


def test_module_entry_point(space_file):
    proc = subprocess.run(
        [sys.executable, "-m", "hermite_quad", "wce", "--space", space_file(FLAT1), "--m", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n_total"] == 1
    proc = subprocess.run([sys.executable, "-m", "hermite_quad", "nodes", "0"], capture_output=True, text=True)
    assert proc.returncode == 2
