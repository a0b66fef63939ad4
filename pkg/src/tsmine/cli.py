"""``tsmine`` command-line interface.

Every command reads an optional YAML key-value config (``--config``); flags
given on the command line override it. Outputs land in ``--out``. Exit codes:
0 success, 2 input errors, 3 numeric degeneracies (e.g. constant channels).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from . import pipeline
from .bench import run_tradeoff
from .dataset import Dataset, SynthConfig, generate_synthetic, write_log
from .errors import InputError, TsmineError
from .evaluation import benchmark, kfold_evaluate, report_from_scores
from .paasax import to_letters
from .pipeline import RunConfig
from .stats import histogram
from .svm import load_model, save_model, train_ovo

log = logging.getLogger("tsmine")

TIMING_NOTE = "wall-clock figures; excluded from the deterministic outputs"


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


# ---------------------------------------------------------------- commands


def cmd_synth(cfg: RunConfig, args) -> None:
    sc = SynthConfig(days=cfg.days)
    out = cfg.out_dir / "log.csv"
    write_log(generate_synthetic(sc, cfg.seed), out)
    log.info("wrote %s (%d days)", out, cfg.days)


def cmd_preprocess(cfg: RunConfig, args) -> None:
    raw = pipeline.load_source(cfg)
    clean, patched = pipeline.clean_log(raw, cfg)
    out = cfg.out_dir
    write_log(clean, out / "clean.csv")
    stats = pipeline.channel_stats(clean)
    cols = ["channel", "min", "max", "mean", "sd", "skewness", "kurtosis", "pearson_r",
            "zeros_patched"]
    _write_csv(out / "stats.csv", cols, [
        [name, *(_fmt(v) for v in s.to_dict().values()), patched[name]]
        for name, s in stats.items()
    ])
    _dump_json({
        "conventions": {
            "sd": "sample standard deviation, n-1 denominator",
            "skewness": "population moment ratio E(x-mu)^3/sigma^3, 1/n estimator",
            "kurtosis": "population moment ratio E(x-mu)^4/sigma^4, 1/n estimator",
            "pearson_r": "against ext_temp",
        },
        "zeros_patched": patched,
        "samples": len(clean),
        "channels": {k: v.to_dict() for k, v in stats.items()},
    }, out / "stats.json")
    hist_rows = []
    for name, ts in clean.channels.items():
        counts, edges = histogram(ts)
        hist_rows += [[name, repr(float(edges[i])), repr(float(edges[i + 1])), int(c)]
                      for i, c in enumerate(counts)]
    _write_csv(out / "histograms.csv", ["channel", "bin_left", "bin_right", "count"], hist_rows)
    log.info("preprocessed %d channels into %s", len(clean.channels), out)


def cmd_encode(cfg: RunConfig, args) -> None:
    clean, _ = pipeline.clean_log(pipeline.load_source(cfg), cfg)
    zs = pipeline.standardize_channels(clean)
    out = cfg.out_dir
    word_rows, report = [], {}
    for name, z in zs.items():
        for start, p, word, _, _ in pipeline.encode_series(z, cfg.w, cfg.a, cfg.window):
            stamp = str(z.timestamps()[start])
            word_rows.append([name, stamp, to_letters(word.symbols),
                              " ".join(map(str, word.symbols.tolist()))])
        report[name] = pipeline.reconstruction_errors(z, cfg.w, cfg.a, cfg.window)
    _write_csv(out / "sax_words.csv", ["channel", "window_start", "word", "symbols"], word_rows)
    length = pipeline.windows(next(iter(zs.values())), cfg.window)[0][1]
    _dump_json({"w": cfg.w, "a": cfg.a, "window": cfg.window, "window_length": length,
                "compression": length / cfg.w, "channels": report}, out / "encode_report.json")

    channel = args.channel or next(iter(zs))
    if channel not in zs:
        raise InputError(f"unknown channel {channel!r}")
    z = zs[channel]
    stamps = z.timestamps()
    overlay = []
    for start, p, _, rp, rs in pipeline.encode_series(z, cfg.w, cfg.a, cfg.window):
        for i in range(p.source_length):
            overlay.append([str(stamps[start + i]), repr(float(z.values[start + i])),
                            repr(float(rp[i])), repr(float(rs[i]))])
    _write_csv(out / f"overlay_{channel}.csv", ["timestamp", "zscore", "paa", "sax"], overlay)

    if args.sweep:
        rows = pipeline.sweep(zs, window=cfg.window)
        _write_csv(out / "sweep.csv", ["channel", "w", "a", "paa_rmse", "sax_rmse", "compression"],
                   [[r["channel"], r["w"], r["a"], repr(r["paa_rmse"]), repr(r["sax_rmse"]),
                     repr(r["compression"])] for r in rows])
    log.info("encoded %d channels (w=%d, a=%d) into %s", len(zs), cfg.w, cfg.a, out)


def _variants(name: str) -> list:
    return ["proc", "paa", "sax"] if name == "all" else [name]


def cmd_dataset(cfg: RunConfig, args) -> None:
    clean, _ = pipeline.clean_log(pipeline.load_source(cfg), cfg)
    for v in _variants(args.variant):
        ds = pipeline.build_dataset(clean, v, cfg)
        ds.to_csv(cfg.out_dir / f"dataset_{v}.csv")
        log.info("dataset-%s: %d rows", v, len(ds))


def _dataset_for(cfg: RunConfig, args) -> Dataset:
    if args.dataset:
        return Dataset.from_csv(args.dataset, args.variant if args.variant != "all" else "proc")
    if args.variant == "all":
        raise InputError("choose a single --variant when building the dataset on the fly")
    clean, _ = pipeline.clean_log(pipeline.load_source(cfg), cfg)
    return pipeline.build_dataset(clean, args.variant, cfg)


def cmd_train(cfg: RunConfig, args) -> None:
    ds = _dataset_for(cfg, args)
    model = train_ovo(ds.features, ds.labels, cfg.kernel_spec(), cfg.gamma,
                      cfg.solver_options(), seed=cfg.seed)
    save_model(model, cfg.out_dir / "model.json")
    log.info("trained %d pairwise classifiers on %d rows", len(model.classifiers), len(ds))


def _write_report(rep, out: Path, prefix: str = "") -> None:
    _dump_json(rep.to_dict(timing=False), out / f"{prefix}report.json")
    _dump_json({**rep.timing(), "note": TIMING_NOTE}, out / f"{prefix}timing.json")
    _write_csv(out / f"{prefix}confusion.csv", ["true\\pred", *rep.confusion.labels],
               [[lab, *row] for lab, row in zip(rep.confusion.labels,
                                                rep.confusion.counts.tolist())])
    roc_rows = [[lab, repr(float(f)), repr(float(t))]
                for lab, curve in rep.roc_curves.items() for f, t in curve]
    _write_csv(out / f"{prefix}roc.csv", ["label", "fpr", "tpr"], roc_rows)


def cmd_eval(cfg: RunConfig, args) -> None:
    ds = _dataset_for(cfg, args)
    if args.model:
        import time

        model = load_model(args.model)
        t0 = time.perf_counter()
        dec = model.decision_matrix(ds.features)
        pred = model.predict(ds.features)
        elapsed = time.perf_counter() - t0
        rep = report_from_scores(ds.labels, pred, model.class_scores(decisions=dec),
                                 model.labels, train_seconds=0.0,
                                 pred_per_second=len(ds) / elapsed if elapsed else 0.0,
                                 folds=0, meta={"model": str(args.model)})
    else:
        rep = kfold_evaluate(ds, cfg.kernel_spec(), cfg.gamma, cfg.folds, cfg.seed,
                             cfg.solver_options())
    _write_report(rep, cfg.out_dir)
    log.info("accuracy %.4f, mean AUC %.4f", rep.accuracy, rep.mean_auc)


def cmd_experiment(cfg: RunConfig, args) -> None:
    clean, _ = pipeline.clean_log(pipeline.load_source(cfg), cfg)
    datasets = [pipeline.build_dataset(clean, v, cfg) for v in ("proc", "paa", "sax")]
    kernels = [cfg.kernel_spec("cubic"), cfg.kernel_spec("gaussian")]
    cells = benchmark(datasets, kernels, cfg.gamma, cfg.folds, cfg.seed, cfg.solver_options())
    out = cfg.out_dir
    metrics, timings = [], []
    for c in cells:
        tag = f"{c['dataset']}_{c['kernel']}"
        _write_report(c["report"], out, prefix=f"{tag}_")
        metrics.append({k: c[k] for k in ("dataset", "kernel", "rows", "accuracy", "mean_auc")})
        timings.append({"dataset": c["dataset"], "kernel": c["kernel"],
                        **c["report"].timing()})
    by = {(m["dataset"], m["kernel"]): m for m in metrics}
    warnings = []
    for v in ("proc", "paa", "sax"):
        if by[v, "gaussian"]["accuracy"] < by[v, "cubic"]["accuracy"]:
            msg = f"dataset-{v}: gaussian accuracy below cubic"
            warnings.append(msg)
            log.warning(msg)
    _dump_json({"cells": metrics, "warnings": warnings, "config": _config_dict(cfg)},
               out / "metrics.json")
    _dump_json({"cells": timings, "note": TIMING_NOTE}, out / "timings.json")
    _write_csv(out / "table.csv", ["dataset", "kernel", "rows", "accuracy", "mean_auc"],
               [[m["dataset"], m["kernel"], m["rows"], repr(m["accuracy"]),
                 repr(m["mean_auc"])] for m in metrics])
    for m in metrics:
        log.info("%-5s %-8s acc %.4f  AUC %.4f", m["dataset"], m["kernel"],
                 m["accuracy"], m["mean_auc"])


def cmd_bench(cfg: RunConfig, args) -> None:
    clean, _ = pipeline.clean_log(pipeline.load_source(cfg), cfg)
    ds = pipeline.build_dataset(clean, args.variant if args.variant != "all" else "proc", cfg)
    if args.sizes:
        sizes = [int(s) for s in args.sizes.split(",")]
    else:
        top = int(0.8 * len(ds))
        sizes = sorted({int(round(top / f)) for f in (30, 10, 3, 1)})
    res = run_tradeoff(ds, sizes, cfg.kernel_spec(), cfg.seed, cfg.gamma,
                       options=cfg.solver_options())
    res.write_csv(cfg.out_dir / "bench.csv")
    _dump_json({"loglog_slope": res.slope, "sizes": sizes, "note": TIMING_NOTE},
               cfg.out_dir / "bench.json")
    log.info("log-log slope of training time vs rows: %.3f", res.slope)


def _config_dict(cfg: RunConfig) -> dict:
    d = dict(vars(cfg))
    d.pop("out", None)
    return d


# ---------------------------------------------------------------- parsing

COMMANDS = {
    "synth": (cmd_synth, "generate a synthetic 14-channel log"),
    "preprocess": (cmd_preprocess, "patch, smooth and summarise every channel"),
    "encode": (cmd_encode, "PAA/SAX-encode channels, optional (w, a) sweep"),
    "dataset": (cmd_dataset, "build dataset-proc / -paa / -sax"),
    "train": (cmd_train, "train a one-vs-one SVM and save it"),
    "eval": (cmd_eval, "cross-validate, or score a saved model"),
    "experiment": (cmd_experiment, "3 datasets x {cubic, gaussian} comparison"),
    "bench": (cmd_bench, "training time vs dataset size"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML file of key: value settings")
    common.add_argument("--input", help="sensor log CSV (default: synthetic data)")
    common.add_argument("--days", type=int, help="synthetic days when no --input")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--smoothing", type=float, help="spline parameter p in [0, 1]")
    common.add_argument("--w", type=int, help="PAA segments per window")
    common.add_argument("--a", type=int, help="SAX alphabet size")
    common.add_argument("--window", choices=("day", "whole"))
    common.add_argument("--breakpoints", choices=("gaussian", "empirical"))
    common.add_argument("--kernel", choices=("linear", "cubic", "gaussian"))
    common.add_argument("--gamma", type=float, help="slack penalty")
    common.add_argument("--sigma", type=float, help="fixed gaussian width")
    common.add_argument("--scale-mode", dest="scale_mode", choices=("fine", "heuristic"))
    common.add_argument("--folds", type=int)
    common.add_argument("--tol", type=float, help="SMO KKT tolerance")
    common.add_argument("--max-iter", dest="max_iter", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="tsmine", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_)
        if name == "encode":
            p.add_argument("--sweep", action="store_true", help="emit the (w, a) grid")
            p.add_argument("--channel", help="channel for the overlay file")
        if name in ("dataset", "train", "eval", "bench"):
            default = "all" if name == "dataset" else ("proc" if name == "bench" else "sax")
            p.add_argument("--variant", choices=("proc", "paa", "sax", "all"), default=default)
        if name in ("train", "eval"):
            p.add_argument("--dataset", help="dataset CSV instead of building one")
        if name == "eval":
            p.add_argument("--model", help="score this saved model instead of cross-validating")
        if name == "bench":
            p.add_argument("--sizes", help="comma-separated ascending row counts")
    return parser


CONFIG_KEYS = ("input", "days", "seed", "out", "smoothing", "w", "a", "window", "breakpoints",
               "kernel", "gamma", "sigma", "scale_mode", "folds", "tol", "max_iter")


def resolve_config(args) -> RunConfig:
    values = {}
    if args.config:
        try:
            loaded = yaml.safe_load(Path(args.config).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise InputError("config file must be a mapping of key: value pairs")
        values.update(loaded)
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return RunConfig.from_mapping(values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        COMMANDS[args.command][0](cfg, args)
    except TsmineError as exc:
        kind = "numeric degeneracy" if exc.exit_code == 3 else "error"
        print(f"tsmine {args.command}: {kind}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
