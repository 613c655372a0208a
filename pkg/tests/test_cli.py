import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from subspace_approx.cli import main, parse_genspec
from subspace_approx.generators import Graph, save_graph, save_ulc, UlcInstance
from subspace_approx.instance import PointSet, ProblemSpec, save_instance

SCHEMA = json.loads(
    (Path(__file__).resolve().parents[1] / "docs" / "report.schema.json").read_text())


@pytest.fixture
def tiny_instance(tmp_path):
    rng = np.random.default_rng(0)
    ps = PointSet(rows=rng.standard_normal((8, 3)))
    path = tmp_path / "tiny.json"
    save_instance(ps, ProblemSpec(k=1, p=2.0), path)
    return path


def read_report(path):
    report = json.loads(path.read_text())
    jsonschema.validate(report, SCHEMA)
    return report


def test_solve_report(tiny_instance, tmp_path):
    out = tmp_path / "report.json"
    assert main(["solve", "--instance", str(tiny_instance), "--out", str(out)]) == 0
    report = read_report(out)
    assert report["kind"] == "solve"
    assert report["relaxation"]["converged"]


def test_solve_single_point_value_zero(tmp_path):
    # one point, k=1: the subspace through the point has distance 0
    path = tmp_path / "one.json"
    save_instance(PointSet(rows=np.array([[1.0, 2.0]])), ProblemSpec(k=1, p=2.0), path)
    out = tmp_path / "report.json"
    assert main(["solve", "--instance", str(path), "--out", str(out)]) == 0
    assert read_report(out)["relaxation"]["value"] == pytest.approx(0.0, abs=1e-6)


def test_infeasible_k_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "m": 2, "n": 2, "k": 2, "p": 2.0, "rows": [[1, 0], [0, 1]]}))
    assert main(["solve", "--instance", str(path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_input_exits_2():
    assert main(["solve", "--instance", "/nonexistent/path.json"]) == 2
    assert main(["solve"]) == 2


def test_strict_nonconvergence_exits_3(tiny_instance, tmp_path):
    out = tmp_path / "r.json"
    code = main(["solve", "--instance", str(tiny_instance), "--strict",
                 "--max-iters", "1", "--tol", "1e-15", "--out", str(out)])
    assert code == 3


def masked(path):
    report = json.loads(path.read_text())
    report["timings"] = None
    return json.dumps(report, sort_keys=True)


def test_round_golden_determinism(tiny_instance, tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    args = ["round", "--instance", str(tiny_instance), "--runs", "8", "--seed", "3"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert masked(out1) == masked(out2)
    report = read_report(out1)
    assert report["ratio"] >= 1 - 1e-6
    # p=2 fixture: svd baseline present and matches the relaxation closely
    assert report["baselines"]["svd"] == pytest.approx(
        report["relaxation"]["value"], rel=1e-5)


def test_round_csv_flattener(tiny_instance, tmp_path):
    out = tmp_path / "r.json"
    csv_path = tmp_path / "r.csv"
    assert main(["round", "--instance", str(tiny_instance),
                 "--out", str(out), "--csv", str(csv_path)]) == 0
    header, row = csv_path.read_text().strip().splitlines()
    assert "rounding.value" in header
    assert len(header.split(",")) == len(row.split(","))


def test_gen_minuncut_roundtrip(tmp_path):
    gpath = tmp_path / "g.json"
    save_graph(Graph(n=3, edges=((0, 1), (1, 2), (0, 2))), gpath)
    ipath = tmp_path / "inst.json"
    assert main(["gen", "minuncut", "--graph", str(gpath), "--p", "4",
                 "--out", str(ipath)]) == 0
    doc = json.loads(ipath.read_text())
    assert doc["m"] == 6 and doc["n"] == 3 and doc["k"] == 2
    assert doc["meta"]["thresholds"]["N"] == doc["meta"]["N"]
    assert main(["solve", "--instance", str(ipath), "--out", str(tmp_path / "s.json")]) == 0


def test_gen_parameter_violation_exits_2(tmp_path, capsys):
    upath = tmp_path / "u.json"
    save_ulc(UlcInstance(nv=1, nw=1, R=1, edges=((0, 0, (0,)),)), upath)
    code = main(["gen", "ulc", "--ulc", str(upath), "--p", "4", "--eta", "0.5",
                 "--out", str(tmp_path / "i.json")])
    assert code == 2
    assert "eta too large" in capsys.readouterr().err


def test_genspec_parsing(tmp_path):
    ps, spec, desc = parse_genspec("gap:n=4,m=10,p=4,seed=1")
    assert ps.rows.shape == (10, 4) and spec.k == 3
    assert desc["genspec"].startswith("gap:")
    with pytest.raises(Exception):
        parse_genspec("nocolon")
    assert main(["solve", "--gen", "unknown:x=1"]) == 2
    assert main(["solve", "--gen", "gap:n=4"]) == 2


def test_verify_suite(capsys):
    assert main(["verify", "--suite", "greedy"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] greedy" in out


def test_gap_experiment_small(tmp_path):
    out = tmp_path / "gap.json"
    assert main(["gap-experiment", "--n", "4", "--m", "200", "--p", "4",
                 "--seeds", "0,1", "--directions", "32", "--refine-iters", "5",
                 "--solve", "--out", str(out)]) == 0
    report = read_report(out)
    assert report["kind"] == "gap-experiment"
    assert len(report["results"]) == 2
    for res in report["results"]:
        assert res["direction_min_refined"] <= res["direction_min_raw"] + 1e-12
        assert res["solver_value"] is not None
