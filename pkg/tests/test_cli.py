import json
import math
import os
from pathlib import Path

import pytest

from fireline import limit
from fireline.cli import main
from fireline.events import write_marks_csv


def write_cfg(path, text):
    path.write_text(text)
    return str(path)


def run_cli(*args):
    return main(list(args))


def manifest(out_dir):
    return json.loads((Path(out_dir) / "run_manifest.json").read_text())


LATTICE_CFG = """
lambda = 0.1
A = 2
T = 1
seed = 5
replicas = 2
probe = 0.0
snapshot_t = 1.5
ignitions = marks
"""


def test_simulate_lattice_smoke(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg", LATTICE_CFG)
    out = tmp_path / "out"
    assert run_cli("simulate-lattice", "--config", cfg, "--out", str(out)) == 0
    probe_csv = (out / "probes_r0000.csv").read_text()
    assert probe_csv.startswith("probe_x,site,t_start,t_end,l,r")
    assert len(probe_csv.strip().split("\n")) > 1
    m = manifest(out)
    assert "burns_r0001.csv" in m["files"]


def test_rerun_is_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg", LATTICE_CFG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_cli("simulate-lattice", "--config", cfg, "--out", str(out1)) == 0
    assert run_cli("simulate-lattice", "--config", cfg, "--out", str(out2)) == 0
    m1, m2 = manifest(out1), manifest(out2)
    assert m1["files"] == m2["files"]
    for name in m1["files"]:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_seed_env_override(tmp_path, monkeypatch):
    cfg = write_cfg(tmp_path / "c.cfg", LATTICE_CFG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_cli("simulate-lattice", "--config", cfg, "--out", str(out1)) == 0
    monkeypatch.setenv("FIRELINE_SEED", "99")
    assert run_cli("simulate-lattice", "--config", cfg, "--out", str(out2)) == 0
    assert manifest(out1)["files"] != manifest(out2)["files"]
    assert manifest(out2)["seed"] == 99


def test_invalid_lambda_exits_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "c.cfg", "lambda = 1.5\nA = 2\nT = 1\nseed = 1\n")
    assert run_cli("simulate-lattice", "--config", cfg, "--out", str(tmp_path / "o")) == 2
    assert "lambda must lie in (0,1)" in capsys.readouterr().err


def test_missing_key_exits_2(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg", "A = 2\nT = 1\nseed = 1\n")
    assert run_cli("simulate-lattice", "--config", cfg, "--out", str(tmp_path / "o")) == 2


def test_simulate_limit_golden_fixture(tmp_path, figure_marks):
    marks_path = tmp_path / "figure_marks.csv"
    write_marks_csv(marks_path, figure_marks)
    cfg = write_cfg(
        tmp_path / "c.cfg",
        f"A = 2\nT = 3.5\nseed = 1\nmarks_file = {marks_path}\n",
    )
    out = tmp_path / "out"
    assert run_cli("simulate-limit", "--config", cfg, "--out", str(out), "--verify") == 0
    timeline_csv = (out / "timeline.csv").read_text().strip().split("\n")
    expected = limit.simulate(2.0, 3.5, figure_marks)
    assert len(timeline_csv) == 1 + len(expected.events)
    kinds = [line.split(",")[2] for line in timeline_csv[1:]]
    assert kinds == [e.kind for e in expected.events]
    # macroscopic rows carry the burned interval
    row9 = timeline_csv[9].split(",")
    assert row9[2] == "macro" and float(row9[3]) == -1.5 and float(row9[4]) == -0.5


def test_simulate_limit_duplicate_marks_exit_2(tmp_path):
    marks_path = tmp_path / "dup.csv"
    marks_path.write_text("t,x\n0.2,1\n0.4,1\n")
    cfg = write_cfg(
        tmp_path / "c.cfg", f"A = 2\nT = 1\nseed = 1\nmarks_file = {marks_path}\n"
    )
    assert run_cli("simulate-limit", "--config", cfg, "--out", str(tmp_path / "o")) == 2


def test_couple_summary_has_all_lambdas(tmp_path):
    cfg = write_cfg(
        tmp_path / "c.cfg",
        "lambda = 0.01\nlambda = 0.005\nlambda = 0.001\n"
        "A = 3\nT = 2\nseed = 4\nreplicas = 3\nprobe = 0.0\n",
    )
    out = tmp_path / "out"
    assert run_cli("couple", "--config", cfg, "--out", str(out)) == 0
    summary = json.loads((out / "couple_summary.json").read_text())
    assert sorted(summary["medians"]) == ["0.001", "0.005", "0.01"]
    records = (out / "couple_records.jsonl").read_text().strip().split("\n")
    assert len(records) == 9


def test_couple_single_replica_deterministic(tmp_path):
    cfg = write_cfg(
        tmp_path / "c.cfg",
        "lambda = 0.01\nA = 3\nT = 2\nseed = 4\nreplicas = 1\nprobe = 0.0\n",
    )
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_cli("couple", "--config", cfg, "--out", str(out1)) == 0
    assert run_cli("couple", "--config", cfg, "--out", str(out2)) == 0
    assert (out1 / "couple_records.jsonl").read_bytes() == (
        out2 / "couple_records.jsonl"
    ).read_bytes()


def test_stats_outputs(tmp_path):
    cfg = write_cfg(
        tmp_path / "c.cfg",
        "estimator = vacant\nestimator = window\nestimator = localization\n"
        "lambda = 0.01\nlambda = 0.02\nt = 2\nT = 1\nA = 2\nreplicas = 10\n"
        "window = 0.1:0.3\nwindow = 0.5:0.7\nprocess = limit\nseed = 3\n",
    )
    out = tmp_path / "out"
    assert run_cli("stats", "--config", cfg, "--out", str(out)) == 0
    rows = json.loads((out / "stats.json").read_text())
    vacant_rows = [r for r in rows if r["estimator"] == "vacant"]
    assert {r["lambda"] for r in vacant_rows} == {0.01, 0.02}
    window_rows = [r for r in rows if r["estimator"] == "window"]
    assert len(window_rows) == 4  # 2 windows x 2 lambdas
    loc_rows = [r for r in rows if r["estimator"] == "localization"]
    assert loc_rows and all(0.0 <= r["p_hat"] <= 1.0 for r in loc_rows)
    csv_lines = (out / "stats_batch.csv").read_text().strip().split("\n")
    assert len(csv_lines) == 1 + len(rows)


def test_threads_do_not_change_results(tmp_path):
    cfg = write_cfg(tmp_path / "c.cfg", LATTICE_CFG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_cli("simulate-lattice", "--config", cfg, "--out", str(out1)) == 0
    assert run_cli(
        "simulate-lattice", "--config", cfg, "--out", str(out2), "--threads", "2"
    ) == 0
    assert manifest(out1)["files"] == manifest(out2)["files"]
