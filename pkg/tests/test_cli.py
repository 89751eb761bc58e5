"""The command-line surface: exit codes, outputs, config layering."""

from __future__ import annotations

import json

import pytest

from tetrislab._version import __version__
from tetrislab.artifacts import csv_body, parse_manifest_line, read_csv
from tetrislab.cli import main
from tetrislab.policy import load_policy


EMPTY = "fixtures/boards/empty.txt"


@pytest.fixture()
def empty_board(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("\n".join(["." * 10] * 20) + "\n", encoding="utf-8")
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_version_exits_zero(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0
    assert __version__ in out


def test_usage_errors_exit_one(capsys):
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys, "play", "--no-such-flag")[0] == 1
    assert run(capsys)[0] == 1  # subcommand required


def test_runtime_errors_exit_two(capsys):
    code, _, err = run(capsys, "play", "--grid", "nonsense")
    assert code == 2
    assert "grid" in err
    code, _, err = run(capsys, "enumerate", "--piece", "Q", "--board", "missing.txt")
    assert code == 2
    code, _, err = run(capsys, "features", "dump", "--board", "/does/not/exist.txt")
    assert code == 2


def test_enumerate_prints_17_for_flat_I(capsys, empty_board):
    code, out, _ = run(capsys, "enumerate", "--piece", "I", "--board", empty_board)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "piece,rotation,column"
    assert lines[-1] == "# total: 17"
    assert len(lines) == 19
    assert lines[1] == "I,0,0"
    assert lines[-2] == "I,1,9"


def test_features_dump_empty_board(capsys, empty_board):
    code, out, _ = run(
        capsys, "features", "dump", "--set", "dellacherie", "--board", empty_board,
        "--move", "none",
    )
    assert code == 0
    values = dict(line.split("=") for line in out.strip().splitlines())
    assert values == {
        "holes": "0.0",
        "landing_height": "0.0",
        "row_transitions": "40.0",
        "column_transitions": "10.0",
        "cumulative_wells": "0.0",
        "eroded_cells": "0.0",
    }


def test_features_dump_with_move(capsys, empty_board):
    code, out, _ = run(
        capsys, "features", "dump", "--set", "dellacherie", "--board", empty_board,
        "--move", "I:1:0",
    )
    assert code == 0
    values = dict(line.split("=") for line in out.strip().splitlines())
    assert values["landing_height"] == "1.5"
    code, _, err = run(
        capsys, "features", "dump", "--board", empty_board, "--move", "sideways"
    )
    assert code == 2


def test_play_summary_and_trace(capsys, tmp_path, empty_board):
    trace_path = tmp_path / "trace.csv"
    code, out, _ = run(
        capsys, "play", "--grid", "10x10", "--seed", "3", "--cap", "300",
        "--trace", str(trace_path),
    )
    assert code == 0
    assert "policy: dellacherie" in out
    assert "lines:" in out and "pieces:" in out
    manifest, header, rows, _ = read_csv(str(trace_path))
    assert manifest["kind"] == "play"
    assert header == ["move", "piece", "rotation", "column", "lines", "reward"]
    assert 1 <= len(rows) <= 300
    assert all(r[1] in "IOTSZJL" for r in rows)


def test_play_two_piece_runs(capsys):
    code, out, _ = run(
        capsys, "play", "--grid", "10x10", "--seed", "3", "--cap", "60", "--two-piece"
    )
    assert code == 0
    assert "pieces:" in out


def test_bench_writes_identical_bodies_across_jobs(capsys, tmp_path):
    outputs = []
    for jobs in ("1", "8"):
        prefix = tmp_path / f"bench{jobs}"
        code, out, _ = run(
            capsys, "bench", "--grid", "10x10", "--games", "4", "--seed", "7",
            "--cap", "300", "--jobs", jobs, "--out", str(prefix),
        )
        assert code == 0
        assert "mean_lines:" in out
        outputs.append(prefix)
    assert csv_body(str(outputs[0]) + ".csv") == csv_body(str(outputs[1]) + ".csv")
    summary = (str(outputs[0]) + ".txt")
    text = open(summary, encoding="utf-8").read()
    assert "games: 4" in text


def test_bench_manifest_records_resolved_options(tmp_path, capsys):
    prefix = tmp_path / "b"
    code, _, _ = run(
        capsys, "bench", "--grid", "10x10", "--games", "2", "--seed", "1",
        "--cap", "200", "--out", str(prefix),
    )
    assert code == 0
    first = open(str(prefix) + ".csv", encoding="utf-8").readline().rstrip("\n")
    manifest = parse_manifest_line(first)
    cmd = manifest["command"]
    assert cmd["subcommand"] == "bench"
    assert cmd["games"] == 2
    assert cmd["cap"] == 200
    assert manifest["game"]["width"] == 10 and manifest["game"]["height"] == 10


def test_config_file_layering(tmp_path, capsys):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"grid": "10x10", "seed": 99, "cap": 150}), encoding="utf-8")
    # config supplies grid/seed/cap; the flag overrides seed
    code, out, _ = run(
        capsys, "play", "--config", str(config), "--seed", "3",
    )
    assert code == 0
    assert "grid: 10x10" in out
    code2, out2, _ = run(capsys, "play", "--grid", "10x10", "--seed", "3", "--cap", "150")
    assert out == out2  # flag+config resolution equals all-flags run


def test_jobs_env_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("TETRISLAB_JOBS", "4")
    prefix = tmp_path / "envbench"
    code, _, _ = run(
        capsys, "bench", "--grid", "10x10", "--games", "2", "--seed", "1",
        "--cap", "100", "--out", str(prefix),
    )
    assert code == 0
    manifest = parse_manifest_line(open(str(prefix) + ".csv", encoding="utf-8").readline().strip())
    assert manifest["command"]["jobs"] == 4


def test_train_writes_policy_and_log(tmp_path, capsys):
    pol = tmp_path / "p.json"
    log = tmp_path / "t.csv"
    code, out, _ = run(
        capsys, "train", "--grid", "8x8", "--set", "dellacherie",
        "--generations", "2", "--pop", "8", "--elite", "2", "--seed", "4",
        "--cap", "80", "--out", str(pol), "--log", str(log),
    )
    assert code == 0
    assert "gen   1" in out and "gen   2" in out
    policy = load_policy(str(pol))
    assert policy.name == "ce_dellacherie"
    assert len(policy.weights) == 6
    manifest, header, rows, _ = read_csv(str(log))
    assert manifest["command"]["subcommand"] == "train"
    assert len(rows) == 2


def test_filter_stats_cli(tmp_path, capsys):
    out_path = tmp_path / "fs.csv"
    code, out, _ = run(
        capsys, "filter-stats", "--grid", "10x10", "--games", "1", "--seed", "2",
        "--cap", "80", "--out", str(out_path),
    )
    assert code == 0
    assert "median_raw:" in out
    manifest, header, rows, trailer = read_csv(str(out_path))
    assert header == ["game", "decision", "piece", "raw", "simple", "cumulative"]
    assert len(rows) == 80
    for row in rows:
        assert int(row[5]) <= int(row[4]) <= int(row[3])
