import json
from pathlib import Path

import pytest

from treelucid.cli import main
from treelucid.instance import instance_from_json
from treelucid.tree import from_json as tree_from_json, depth as tree_depth


@pytest.fixture()
def pn4_path(tmp_path):
    path = tmp_path / "pn4.json"
    assert main(["demo", "pn", "4", "--out", str(path)]) == 0
    return path


def test_demo_writes_parseable_instance(pn4_path):
    inst = instance_from_json(pn4_path.read_text())
    assert inst.n_points == 5


def test_demo_unknown_name_exits_2(tmp_path, capsys):
    assert main(["demo", "mystery"]) == 2


def test_oracle_prints_depth(pn4_path, capsys):
    assert main(
        ["oracle", "--instance", str(pn4_path), "--epsilon", "1/4", "--dmax", "4"]
    ) == 0
    assert capsys.readouterr().out.strip() == "2"


def test_oracle_above_cap(tmp_path, capsys):
    two = tmp_path / "two.json"
    main(["demo", "two_point", "--out", str(two)])
    assert main(
        ["oracle", "--instance", str(two), "--epsilon", "0.25", "--dmax", "3"]
    ) == 0
    assert "AboveCap(3)" in capsys.readouterr().out


def test_boost_outputs(pn4_path, tmp_path, capsys):
    tree_path = tmp_path / "tree.json"
    trace_path = tmp_path / "trace.csv"
    code = main(
        [
            "boost",
            "--instance", str(pn4_path),
            "--gamma", "0.125",
            "--epsilon", "0.05",
            "--out", str(tree_path),
            "--trace", str(trace_path),
        ]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["fully_certified"] is True
    tree = tree_from_json(tree_path.read_text())
    assert tree_depth(tree) <= summary["phases"]
    lines = trace_path.read_text().splitlines()
    assert lines[0] == "phase,surrogate,min_leaf_advantage,certified"
    assert len(lines) == summary["phases"] + 1
    assert trace_path.with_suffix(".png").exists()


def test_profile_csv_and_figure(pn4_path, tmp_path):
    out = tmp_path / "profile.csv"
    code = main(
        [
            "profile",
            "--instance", str(pn4_path),
            "--epsilons", "1/2,3/8,1/4",
            "--dmax", "4",
            "--out", str(out),
        ]
    )
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "epsilon,depth"
    assert [r.split(",")[1] for r in rows[1:]] == ["0", "1", "2"]
    assert out.with_suffix(".png").exists()


def test_compress_round_trip(pn4_path, tmp_path, capsys):
    out = tmp_path / "stacked.json"
    code = main(
        [
            "compress",
            "--instance", str(pn4_path),
            "--weak-depth", "2",
            "--gamma", "0.05",
            "--out", str(out),
        ]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    tree = tree_from_json(out.read_text())
    assert tree_depth(tree) == summary["multiset_size"] * 2


def test_gcm(pn4_path, capsys):
    assert main(
        ["gcm", "--instance", str(pn4_path), "--epsilon", "0", "--budget", "20"]
    ) == 0
    assert capsys.readouterr().out.strip() == "3"


def test_classify_and_report(tmp_path, capsys):
    report = tmp_path / "table.csv"
    code = main(
        [
            "classify",
            "--family", "pn",
            "--range", "2..4..2",
            "--gamma", "0.25",
            "--dmax", "2",
            "--report", str(report),
        ]
    )
    assert code == 0
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["case"] == "case2"
    assert report.exists() and report.with_suffix(".png").exists()


def test_sweep_parallel_jobs(tmp_path, capsys):
    code = main(
        [
            "sweep",
            "--family", "pn",
            "--range", "2,4",
            "--gamma", "0.05",
            "--dmax", "3",
            "--jobs", "2",
        ]
    )
    assert code == 0
    result = json.loads(capsys.readouterr().out)
    assert result["depth"] == 1  # worst d=1 value over pn(2), pn(4) is <= 0.45


def test_export_dot(pn4_path, tmp_path, capsys):
    tree_path = tmp_path / "tree.json"
    main(
        [
            "boost",
            "--instance", str(pn4_path),
            "--gamma", "0.125",
            "--epsilon", "0.05",
            "--out", str(tree_path),
        ]
    )
    capsys.readouterr()
    assert main(
        ["export-dot", "--tree", str(tree_path), "--instance", str(pn4_path)]
    ) == 0
    assert "digraph" in capsys.readouterr().out


def test_missing_file_exits_2(capsys):
    assert main(
        ["oracle", "--instance", "/nonexistent.json", "--epsilon", "0", "--dmax", "1"]
    ) == 2


def test_unknown_flag_exits_2():
    assert main(["oracle", "--bogus", "x"]) == 2


def test_determinism(pn4_path, tmp_path):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / f"{tag}.json"
        main(
            [
                "compress",
                "--instance", str(pn4_path),
                "--weak-depth", "1",
                "--gamma", "0.05",
                "--seed", "7",
                "--out", str(out),
            ]
        )
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
