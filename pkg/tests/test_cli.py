import csv
import json
import subprocess
import sys

import numpy as np
import pytest
import yaml

from tsmine.cli import main
from tsmine.dataset import LOG_COLUMNS, SynthConfig, generate_synthetic, read_log, write_log

TIMING_FILES = {"timing.json", "timings.json", "bench.csv", "bench.json"}


def run(*args):
    return main([str(a) for a in args])


def outputs(folder):
    return {p.name: p.read_bytes() for p in sorted(folder.iterdir())
            if not any(p.name.endswith(t) for t in TIMING_FILES)}


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def raw_log(tmp_path_factory):
    path = tmp_path_factory.mktemp("src") / "log.csv"
    log = generate_synthetic(SynthConfig(days=4), seed=5)
    ch = dict(log.channels)
    dropped = ch["ahu3_evac"].values.copy()
    dropped[[0, 100, 101]] = 0.0
    ch["ahu3_evac"] = ch["ahu3_evac"].with_values(dropped)
    write_log(type(log)(ch), path)
    return path


def test_synth(tmp_path):
    assert run("synth", "--days", 2, "--seed", 1, "--out", tmp_path) == 0
    log = read_log(tmp_path / "log.csv")
    assert tuple(log.channels) == LOG_COLUMNS and len(log) == 576


def test_preprocess_outputs(tmp_path, raw_log):
    assert run("preprocess", "--input", raw_log, "--out", tmp_path) == 0
    stats = rows(tmp_path / "stats.csv")
    assert [r["channel"] for r in stats] == list(LOG_COLUMNS)
    assert len(stats) == 14
    assert {r["channel"]: int(r["zeros_patched"]) for r in stats}["ahu3_evac"] == 3
    clean = read_log(tmp_path / "clean.csv")
    for ts in clean.channels.values():
        assert not np.any(ts.values == 0.0)
    report = json.loads((tmp_path / "stats.json").read_text())
    assert "n-1" in report["conventions"]["sd"]
    assert report["channels"]["ext_temp"]["pearson_r"] is None
    hist = rows(tmp_path / "histograms.csv")
    assert {r["channel"] for r in hist} == set(LOG_COLUMNS)


def test_constant_channel_exit_code(tmp_path, raw_log, capsys):
    log = read_log(raw_log)
    ch = dict(log.channels)
    ch["ahu2_rec"] = ch["ahu2_rec"].with_values(np.full(len(log), 21.0))
    bad = tmp_path / "const.csv"
    write_log(type(log)(ch), bad)
    code = run("preprocess", "--input", bad, "--out", tmp_path / "o")
    assert code == 3
    assert "degenerate variance" in capsys.readouterr().err


def test_input_error_exit_code(tmp_path, capsys):
    assert run("preprocess", "--input", tmp_path / "missing.csv", "--out", tmp_path) == 2
    assert run("encode", "--days", 2, "--w", 0, "--out", tmp_path) == 2
    cfg = tmp_path / "c.yaml"
    cfg.write_text("bogus_key: 1\n")
    assert run("synth", "--config", cfg, "--out", tmp_path) == 2


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(yaml.safe_dump({"days": 3, "seed": 2, "out": str(tmp_path / "a")}))
    assert run("synth", "--config", cfg) == 0
    assert len(read_log(tmp_path / "a" / "log.csv")) == 3 * 288
    assert run("synth", "--config", cfg, "--days", 1, "--out", tmp_path / "b") == 0
    assert len(read_log(tmp_path / "b" / "log.csv")) == 288


def test_encode_and_sweep(tmp_path, raw_log):
    assert run("encode", "--input", raw_log, "--out", tmp_path, "--sweep") == 0
    words = rows(tmp_path / "sax_words.csv")
    assert all(len(r["word"]) == 10 and set(r["word"]) <= set("abcdef") for r in words)
    report = json.loads((tmp_path / "encode_report.json").read_text())
    assert report["compression"] == pytest.approx(28.8)
    sweep = rows(tmp_path / "sweep.csv")
    cell = {(r["channel"], int(r["w"]), int(r["a"])): r for r in sweep}
    channels = {r["channel"] for r in sweep}
    for ch in channels:
        assert (ch, 8, 4) in cell and (ch, 10, 6) in cell
        assert float(cell[ch, 10, 6]["sax_rmse"]) <= float(cell[ch, 8, 4]["sax_rmse"])
    assert (tmp_path / "overlay_ahu1_evac.csv").exists()


def test_dataset_train_eval(tmp_path, raw_log):
    assert run("dataset", "--input", raw_log, "--out", tmp_path) == 0
    sizes = {v: len(rows(tmp_path / f"dataset_{v}.csv")) for v in ("proc", "paa", "sax")}
    assert sizes["paa"] == sizes["sax"] == 4 * 4 * 10
    assert sizes["proc"] == 4 * 288 * 4
    ds = tmp_path / "dataset_sax.csv"
    assert run("train", "--dataset", ds, "--variant", "sax", "--out", tmp_path) == 0
    model = json.loads((tmp_path / "model.json").read_text())
    assert len(model["classifiers"]) == 6
    assert run("eval", "--dataset", ds, "--model", tmp_path / "model.json", "--out",
               tmp_path / "holdout") == 0
    assert run("eval", "--dataset", ds, "--variant", "sax", "--folds", 4, "--out",
               tmp_path / "cv") == 0
    rep = json.loads((tmp_path / "cv" / "report.json").read_text())
    assert rep["folds"] == 4 and rep["rows"] == sizes["sax"]
    assert "timing" not in rep


def test_experiment_cells_and_determinism(tmp_path, raw_log):
    for name in ("a", "b"):
        assert run("experiment", "--input", raw_log, "--out", tmp_path / name) == 0
    metrics = json.loads((tmp_path / "a" / "metrics.json").read_text())
    assert len(metrics["cells"]) == 6
    assert {(c["dataset"], c["kernel"]) for c in metrics["cells"]} == {
        (d, k) for d in ("proc", "paa", "sax") for k in ("cubic", "gaussian")}
    a, b = outputs(tmp_path / "a"), outputs(tmp_path / "b")
    assert a.keys() == b.keys() and a == b
    assert (tmp_path / "a" / "timings.json").exists()


def test_synthetic_commands_deterministic(tmp_path):
    for name in ("a", "b"):
        assert run("encode", "--days", 2, "--seed", 8, "--out", tmp_path / name) == 0
        assert run("dataset", "--days", 2, "--seed", 8, "--out", tmp_path / name) == 0
    assert outputs(tmp_path / "a") == outputs(tmp_path / "b")


def test_bench_command(tmp_path, raw_log):
    assert run("bench", "--input", raw_log, "--variant", "paa", "--sizes", "20,60,120",
               "--out", tmp_path) == 0
    out = json.loads((tmp_path / "bench.json").read_text())
    assert out["sizes"] == [20, 60, 120]
    assert len(rows(tmp_path / "bench.csv")) == 3


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "tsmine.cli", "preprocess", "--input",
                           str(tmp_path / "nope.csv"), "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "cannot read log" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "tsmine.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "experiment" in proc.stdout
