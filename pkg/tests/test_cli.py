import json
import os
from pathlib import Path

import pytest

from attrition.cli import main, write_atomic
from attrition.config import load_config
from attrition.errors import ConfigError

from conftest import IBM_CSV, BENCH_CFG

FAST_CFG = f"""
[data]
path = {IBM_CSV}

[run]
seed = 1
iterations = 2
output_dir = out

[adaboost]
n_estimators = 20

[forest]
n_trees = 5
"""


@pytest.fixture
def cfg(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(FAST_CFG)
    return path


def run(cfg, *args):
    return main([args[0], "--config", str(cfg), *args[1:]])


def snapshot(root: Path) -> dict:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_describe(cfg, tmp_path):
    assert run(cfg, "describe") == 0
    summary = json.loads((tmp_path / "out" / "describe.json").read_text())
    assert summary["rows"] == 1470 and summary["features"] == 30
    assert summary["label_counts"] == {"No": 1233, "Yes": 237}
    assert summary["majority_baseline"] == 1233 / 1470


def test_correlate_outputs(cfg, tmp_path):
    assert run(cfg, "correlate", "--top", "3") == 0
    out = tmp_path / "out"
    top = json.loads((out / "correlation_top.json").read_text())
    assert len(top) == 3 and {top[0]["a"], top[0]["b"]} == {"JobLevel", "MonthlyIncome"}
    assert (out / "correlation.svg").read_text().startswith("<svg")
    assert len((out / "correlation.csv").read_text().splitlines()) == 31
    figures = sorted(p.name for p in (out / "figures").iterdir())
    assert len([f for f in figures if f.startswith("heatmap_")]) == 6
    assert len([f for f in figures if f.startswith("scatter_")]) == 2


def test_train_then_evaluate(cfg, tmp_path):
    model_file = tmp_path / "m.json"
    assert run(cfg, "train", "--model", "adaboost", "--iteration", "2", "--out", str(model_file)) == 0
    doc = json.loads(model_file.read_text())
    assert doc["split"]["iteration"] == 2 and doc["kind"] == "adaboost"
    assert run(cfg, "evaluate", "--model-file", str(model_file)) == 0
    report = json.loads((tmp_path / "out" / "reports" / "adaboost_eval.json").read_text())
    assert report["split"]["seed"] == doc["split"]["seed"]
    assert report["dataset_majority_baseline"] == 1233 / 1470
    assert report["confusion"]["tp"] + report["confusion"]["fn"] + report["confusion"]["tn"] + report["confusion"]["fp"] == 441


def test_evaluate_matches_benchmark_cell(cfg, tmp_path):
    assert run(cfg, "benchmark") == 0
    bench = json.loads((tmp_path / "out" / "benchmark.json").read_text())
    for name in ("adaboost", "svm", "forest"):
        assert run(cfg, "train", "--model", name, "--iteration", "2") == 0
        assert run(cfg, "evaluate", "--model-file", str(tmp_path / "out" / "models" / f"{name}.json")) == 0
        report = json.loads((tmp_path / "out" / "reports" / f"{name}_eval.json").read_text())
        assert report["accuracy"] == bench["iterations"][1]["reports"][name]["accuracy"]
    csv_lines = (tmp_path / "out" / "benchmark.csv").read_text().splitlines()
    assert csv_lines[1].startswith("ITERATION 1,") and csv_lines[-1].startswith("MEAN")


def test_roc(cfg, tmp_path):
    assert run(cfg, "roc") == 0
    roc = tmp_path / "out" / "roc"
    meta = json.loads((roc / "roc.json").read_text())
    assert set(meta["models"]) == {"adaboost", "svm", "forest"}
    assert all(0.5 < m["auc"] <= 1 for m in meta["models"].values())
    assert (roc / "roc_svm.csv").read_text().splitlines()[1] == "0.0,0.0,inf"


def test_outputs_are_reproducible(cfg, tmp_path):
    assert run(cfg, "benchmark") == 0
    assert run(cfg, "correlate") == 0
    first = snapshot(tmp_path / "out")
    assert run(cfg, "benchmark") == 0
    assert run(cfg, "correlate") == 0
    assert snapshot(tmp_path / "out") == first
    assert not [p for p in (tmp_path / "out").rglob("*.tmp")]


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_config_errors_exit_2(cfg, tmp_path, capsys):
    assert run(cfg, "describe", "--set", "run.nope=1") == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("[mystery]\nx = 1\n")
    assert main(["describe", "--config", str(bad)]) == 2
    assert main(["describe", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert run(cfg, "train", "--model", "knn") == 2
    assert "config error" in capsys.readouterr().err


def test_pipeline_error_exits_1_and_names_stage(cfg, tmp_path, capsys):
    broken = tmp_path / "broken.csv"
    broken.write_text("Age,Attrition\n1,Yes\n")
    assert run(cfg, "describe", "--data", str(broken)) == 1
    assert "error in dataset" in capsys.readouterr().err


def test_output_dir_precedence(cfg, tmp_path, monkeypatch):
    monkeypatch.setenv("ATTRITION_OUTPUT_DIR", str(tmp_path / "from_env"))
    assert run(cfg, "describe") == 0
    assert (tmp_path / "from_env" / "describe.json").exists()
    assert run(cfg, "describe", "-o", str(tmp_path / "from_flag")) == 0
    assert (tmp_path / "from_flag" / "describe.json").exists()


def test_config_file_paths_resolve_against_file(tmp_path):
    loaded = load_config(BENCH_CFG, env={})
    assert loaded.data_path.resolve() == IBM_CSV.resolve()
    assert loaded.iterations == 3 and [m.name for m in loaded.models] == ["adaboost", "svm", "forest"]
    assert loaded.model("adaboost").params.n_estimators == 1000
    over = load_config(BENCH_CFG, ["run.seed=5", "forest.n_trees=7"], env={})
    assert over.seed == 5 and over.model("forest").params.n_trees == 7
    with pytest.raises(ConfigError):
        load_config(BENCH_CFG, ["split.test_fraction=1.5"], env={})
    with pytest.raises(ConfigError):
        load_config(BENCH_CFG, ["svm.kernel=poly"], env={})


def test_write_atomic_leaves_no_partial_file(tmp_path, monkeypatch):
    target = tmp_path / "a" / "f.txt"
    write_atomic(target, "old")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        write_atomic(target, "new")
    assert target.read_text() == "old"
    assert [p.name for p in target.parent.iterdir()] == ["f.txt"]


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "attrition", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "attrition" in out.stdout
