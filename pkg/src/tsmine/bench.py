"""Training-time versus dataset-size trade-off measurements."""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .errors import InputError
from .evaluation import report_from_scores
from .svm import KernelSpec, SolverOptions, train_ovo, vote


@dataclass(frozen=True)
class BenchResult:
    variant: str
    rows: int
    kernel: str
    train_seconds: float
    pred_per_second: float
    accuracy: float
    mean_auc: float


@dataclass(frozen=True)
class Tradeoff:
    results: list
    slope: float

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(BenchResult.__dataclass_fields__))
            for r in self.results:
                w.writerow(list(asdict(r).values()))


def loglog_slope(rows, seconds) -> float:
    """Least-squares slope of log(seconds) against log(rows)."""
    x = np.log(np.asarray(rows, dtype=np.float64))
    y = np.log(np.asarray(seconds, dtype=np.float64))
    if x.size < 2:
        raise InputError("slope needs at least two sizes")
    return float(np.polyfit(x, y, 1)[0])


def nested_split(labels, test_fraction: float, seed: int):
    """Stratified held-out test rows and a seeded ordering of the rest.

    Prefixes of the returned training order form nested subsets whose class
    mix stays close to the full set.
    """
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    test, pool = [], []
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        idx = idx[rng.permutation(idx.size)]
        k = int(round(test_fraction * idx.size))
        test.append(idx[:k])
        pool.append(idx[k:])
    # interleave classes so every prefix is roughly stratified
    frac = np.concatenate([(np.arange(p.size) + 0.5) / p.size for p in pool])
    pool = np.concatenate(pool)
    order = pool[np.lexsort((pool, frac))]
    return np.sort(np.concatenate(test)), order


def run_tradeoff(dataset: Dataset, sizes, kernel: KernelSpec, seed: int = 0,
                 gamma: float = 1.0, repeats: int = 3, test_fraction: float = 0.2,
                 options: SolverOptions = SolverOptions()) -> Tradeoff:
    """Train on nested subsets of ``dataset`` and time each size.

    Training time is the median of ``repeats`` fits; accuracy and AUC come
    from one shared held-out test split.
    """
    sizes = [int(s) for s in sizes]
    if not sizes or sizes != sorted(sizes):
        raise InputError("sizes must be a non-empty ascending list")
    test, order = nested_split(dataset.labels, test_fraction, seed)
    if sizes[-1] > order.size:
        raise InputError(f"size {sizes[-1]} exceeds the {order.size} available training rows")
    X, y = dataset.features, dataset.labels
    results = []
    for size in sizes:
        rows = np.sort(order[:size])
        times = []
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            model = train_ovo(X[rows], y[rows], kernel, gamma, options, seed=seed)
            times.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        dec = model.decision_matrix(X[test])
        pred = vote(dec, model.pairs, model.labels)
        pred_s = time.perf_counter() - t0
        rep = report_from_scores(
            y[test], pred, model.class_scores(decisions=dec), model.labels,
            train_seconds=statistics.median(times),
            pred_per_second=test.size / pred_s if pred_s > 0 else float("inf"),
            folds=1,
        )
        results.append(BenchResult(dataset.variant, size, kernel.kind, rep.train_seconds,
                                   rep.pred_per_second, rep.accuracy, rep.mean_auc))
    slope = loglog_slope([r.rows for r in results], [r.train_seconds for r in results]) \
        if len(results) > 1 else float("nan")
    return Tradeoff(results, slope)
