from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from mgsheaves.cli import JobConfig, main, parse_weight


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_graph_text_and_json(capsys):
    code, out, _ = run(capsys, "graph", "--type", "A", "--rank", "2")
    assert code == 0 and out.startswith("6 vertices, 9 edges")
    code, out, _ = run(capsys, "graph", "--rank", "2", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and len(doc["vertices"]) == 6


def test_graph_dot(capsys):
    code, out, _ = run(capsys, "graph", "--rank", "1", "--format", "dot")
    assert code == 0 and out.lstrip().startswith(("graph", "digraph"))


def test_singular_weight_gives_smaller_block(capsys):
    code, out, _ = run(capsys, "graph", "--rank", "2", "--lambda", "-1,-3")
    assert code == 0 and out.startswith("3 vertices")


@pytest.mark.parametrize("argv", [
    ["graph", "--type", "Z", "--rank", "9"],
    ["graph", "--rank", "2", "--lambda", "1,1"],
    ["graph", "--rank", "2", "--lambda", "x,y"],
    ["graph", "--rank", "2", "--lambda", "-2"],
    ["verify", "--rank", "1", "--suite", "nonsense"],
    ["bmp", "--rank", "1", "--base", "s9"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_bmp_json(capsys):
    code, out, _ = run(capsys, "bmp", "--rank", "1", "--dir", "down", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1
    assert [r["base"] for r in doc["results"]] == ["e", "s1"]


def test_bmp_truncated_cap_fails(capsys):
    code, out, _ = run(capsys, "bmp", "--rank", "2", "--degree-cap", "2", "--base", "s1s2s1")
    assert code == 1 and "not saturated" in out


def test_table_csv(capsys):
    code, out, _ = run(capsys, "table", "--rank", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 7 and len(rows[0]) == 7
    assert all(v in {"0", "1"} for row in rows[1:] for v in row[1:])


def test_verify_fixture_reports_gkm_failure(capsys):
    code, out, _ = run(capsys, "verify", "--fixture", "double-label", "--suite", "gkm", "--format", "json")
    doc = json.loads(out)
    assert code == 1 and doc["ok"] is False
    assert doc["suites"][0]["suite"] == "gkm"


def test_verify_block_only_suite_on_fixture_fails(capsys):
    code, out, _ = run(capsys, "verify", "--fixture", "tripod", "--suite", "kl-bmp")
    assert code == 1 and "FAIL" in out


def test_verify_output_file(tmp_path, capsys):
    target = tmp_path / "v.json"
    code, out, _ = run(capsys, "verify", "--rank", "1", "--format", "json", "--output", str(target))
    assert code == 0 and out == ""
    doc = json.loads(target.read_text())
    assert doc["schema_version"] == 1 and doc["ok"]


def test_verify_is_deterministic(capsys):
    first = run(capsys, "verify", "--rank", "1", "--format", "json")[1]
    second = run(capsys, "verify", "--rank", "1", "--format", "json")[1]
    assert first == second


def test_job_config_round_trip():
    cfg = JobConfig(cartan_type="B", rank=2, weight=parse_weight("-1, -5/2"), degree_cap=20)
    again = JobConfig.from_json(json.loads(json.dumps(cfg.to_json())))
    assert again == cfg
    assert [str(c) for c in again.weight_coords()] == ["-1", "-5/2"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mgsheaves", "graph", "--rank", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("2 vertices")
