import json
import subprocess
import sys
from pathlib import Path

import pytest

from tractorbracket.cli import SCHEMA_VERSION, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_config(tmp_path: Path, **doc) -> str:
    base = {"algebra": {"family": "A", "rank": 2}, "sigma": [1], "seed": 7, "samples": 3, "max_poly_degree": 2}
    base.update(doc)
    path = tmp_path / "ctx.json"
    path.write_text(json.dumps(base), encoding="utf-8")
    return str(path)


def test_grade_single_sigma(capsys):
    code, out, _ = run(capsys, "grade", "--family", "A", "--rank", "2", "--sigma", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == SCHEMA_VERSION
    (row,) = doc["rows"]
    assert row["k"] == 1 and row["dims"] == [2, 4, 2] and row["passed"]


def test_grade_all_sigmas(capsys):
    code, out, _ = run(capsys, "grade", "--family", "A", "--rank", "2")
    assert code == 0
    assert [r["sigma"] for r in json.loads(out)["rows"]] == [[1], [2], [1, 2]]


def test_grade_bad_sigma_is_usage_error(capsys):
    code, _, err = run(capsys, "grade", "--family", "A", "--rank", "2", "--sigma", "5")
    assert code == 2
    assert "out of range" in err


def test_grade_text_format(capsys):
    code, out, _ = run(capsys, "grade", "--family", "A", "--rank", "2", "--sigma", "1,2", "--format", "text")
    assert code == 0
    assert "dims=1/2/2/2/1" in out


@pytest.mark.parametrize("argv", [
    ["grade", "--family", "A"],
    ["grade", "--family", "E", "--rank", "6"],
    ["grade", "--family", "A", "--rank", "2", "--sigma", "x"],
    ["verify"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_classify_counts(capsys):
    code, out, _ = run(capsys, "classify", "--family", "A", "--rank", "1")
    doc = json.loads(out)
    assert code == 0
    assert doc["counts"]["coisotropic"] == 3
    assert doc["counterexamples"] == []
    code, out, _ = run(capsys, "classify", "--family", "A", "--rank", "2")
    assert code == 0 and json.loads(out)["counterexamples"] == []


def test_classify_refuses_over_cap(capsys):
    code, out, _ = run(capsys, "classify", "--family", "D", "--rank", "4")
    assert code == 2
    doc = json.loads(out)
    assert doc["roots"] == 24 and doc["cap"] == 12


def test_verify_flat(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--config", write_config(tmp_path))
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert doc["jacobi"]["status"] == "satisfied"
    assert doc["h4"] == "0"
    assert doc["seed"] == 7


def test_verify_twisted_is_reported_not_failed(capsys, tmp_path):
    cfg = write_config(tmp_path, algebra={"family": "A", "rank": 3}, sigma=[1, 2, 3],
                       h_form="x1*dx2^dx3^dx4", samples=2)
    code, out, _ = run(capsys, "verify", "--config", cfg)
    doc = json.loads(out)
    assert code == 0
    assert doc["jacobi"]["status"] == "twisted"
    assert doc["h4"] == "dx1^dx2^dx3^dx4"
    names = {c["name"]: c["passed"] for c in doc["axioms"]["checks"]}
    assert names["non_skew_symmetry"] and names["metric_preservation"]


def test_verify_unobstructed_connection(capsys, tmp_path):
    cfg = write_config(tmp_path, algebra={"family": "A", "rank": 3}, sigma=[2], samples=2,
                       max_poly_degree=1, h_form="unobstructed",
                       connection=[{"value_index": 0, "form": "-x4*dx3"},
                                   {"value_index": 2, "form": "2*x4*dx2 - dx2 + 2*x1*dx4"},
                                   {"value_index": 4, "form": "2*x1*dx4"},
                                   {"value_index": 5, "form": "-3*x4*dx1 - 2*dx3"}])
    code, out, _ = run(capsys, "verify", "--config", cfg)
    doc = json.loads(out)
    assert code == 0, out
    assert doc["jacobi"]["status"] == "satisfied"
    assert doc["pontrjagin"]["form"] != "0"


def test_verify_parse_error_position(capsys, tmp_path):
    cfg = write_config(tmp_path, connection=[{"value_index": 0, "form": "x1**"}])
    code, _, err = run(capsys, "verify", "--config", cfg)
    assert code == 2
    assert "connection[0].form" in err and "line 1, column 4" in err


def test_verify_dimension_error_field_path(capsys, tmp_path):
    cfg = write_config(tmp_path, connection=[{"value_index": 9, "form": "x1*dx2"}])
    code, _, err = run(capsys, "verify", "--config", cfg)
    assert code == 2
    assert "connection[0].value_index" in err


def test_verify_bad_json(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"algebra": ', encoding="utf-8")
    code, _, err = run(capsys, "verify", "--config", str(path))
    assert code == 2 and "line 1" in err


def test_verify_is_byte_identical(capsys, tmp_path):
    cfg = write_config(tmp_path)
    first = run(capsys, "verify", "--config", cfg, "--seed", "3")[1]
    second = run(capsys, "verify", "--config", cfg, "--seed", "3")[1]
    assert first == second
    assert json.loads(first)["seed"] == 3


def test_timings_are_opt_in(capsys, tmp_path):
    cfg = write_config(tmp_path, samples=1)
    assert "timings" not in json.loads(run(capsys, "verify", "--config", cfg)[1])
    assert "timings" in json.loads(run(capsys, "verify", "--config", cfg, "--timings")[1])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tractorbracket", "grade", "--family", "A", "--rank", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][0]["dims"] == [1, 1, 1]
