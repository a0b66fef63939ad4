"""Cross-validated evaluation: confusion matrices, rates, ROC/AUC, timings."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .dataset import Dataset
from .errors import InputError
from .svm import KernelSpec, SolverOptions, train_ovo, vote

__all__ = [
    "ConfusionMatrix",
    "BinaryMetrics",
    "EvalReport",
    "binary_metrics",
    "roc_curve",
    "roc_auc",
    "stratified_folds",
    "kfold_evaluate",
    "benchmark",
]


class BinaryMetrics(NamedTuple):
    """Accuracy, sensitivity, specificity, precision; None when undefined."""

    accuracy: float | None
    tpr: float | None
    tnr: float | None
    ppv: float | None


def _ratio(num, den):
    return None if den == 0 else num / den


def binary_metrics(counts) -> BinaryMetrics:
    """Rates from a 2x2 count grid ``[[TP, FN], [FP, TN]]``.

    Rows are the true class (positive first), columns the prediction.
    """
    (tp, fn), (fp, tn) = np.asarray(counts, dtype=np.int64).tolist()
    if min(tp, fn, fp, tn) < 0:
        raise InputError("counts must be non-negative")
    p, n = tp + fn, fp + tn
    return BinaryMetrics(
        accuracy=_ratio(tp + tn, p + n),
        tpr=_ratio(tp, p),
        tnr=_ratio(tn, n),
        ppv=_ratio(tp, tp + fp),
    )


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    counts: np.ndarray
    labels: tuple

    @classmethod
    def from_predictions(cls, truth, predicted, labels=None) -> "ConfusionMatrix":
        truth = np.asarray(truth)
        predicted = np.asarray(predicted)
        labels = tuple(np.unique(truth).tolist()) if labels is None else tuple(labels)
        pos = {lab: i for i, lab in enumerate(labels)}
        try:
            ti = np.array([pos[v] for v in truth.tolist()], dtype=np.int64)
            pi = np.array([pos[v] for v in predicted.tolist()], dtype=np.int64)
        except KeyError as exc:
            raise InputError(f"label {exc.args[0]!r} not in {labels}") from None
        counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
        np.add.at(counts, (ti, pi), 1)
        return cls(counts, labels)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.total)

    def one_vs_rest(self, label) -> np.ndarray:
        """2x2 ``[[TP, FN], [FP, TN]]`` for ``label`` against the rest."""
        i = self.labels.index(label)
        tp = self.counts[i, i]
        fn = self.counts[i].sum() - tp
        fp = self.counts[:, i].sum() - tp
        tn = self.total - tp - fn - fp
        return np.array([[tp, fn], [fp, tn]])


def _roc_counts(scores, truth):
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    truth = np.asarray(truth).reshape(-1).astype(bool)
    if scores.size != truth.size:
        raise InputError("scores and truth differ in length")
    p = int(truth.sum())
    n = truth.size - p
    if p == 0 or n == 0:
        raise InputError("ROC needs both positive and negative rows")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    t = truth[order]
    last = np.r_[np.nonzero(np.diff(s))[0], s.size - 1]
    tps = np.r_[0, np.cumsum(t)[last]]
    fps = np.r_[0, np.cumsum(~t)[last]]
    thresholds = np.r_[np.inf, s[last]]
    return fps, tps, thresholds, p, n


def roc_curve(scores, truth) -> tuple:
    """(fpr, tpr, thresholds) sweeping the threshold over distinct scores.

    Starts at (0, 0) with an infinite threshold and ends at (1, 1).
    """
    fps, tps, thr, p, n = _roc_counts(scores, truth)
    return fps / n, tps / p, thr


def roc_auc(scores, truth) -> tuple:
    """ROC points and trapezoidal AUC.

    The area is accumulated on integer counts and divided once, so it equals
    the fraction of concordant positive/negative pairs (ties count half).
    """
    fps, tps, _, p, n = _roc_counts(scores, truth)
    twice_area = int(np.sum(np.diff(fps) * (tps[1:] + tps[:-1])))
    curve = np.column_stack([fps / n, tps / p])
    return curve, twice_area / (2 * p * n)


def stratified_folds(labels, folds: int, seed: int = 0) -> np.ndarray:
    """Fold index per row, class ratios preserved, deterministic per seed.

    Each class is shuffled and dealt round-robin, starting where the previous
    class left off so fold sizes differ by at most one overall.
    """
    labels = np.asarray(labels).reshape(-1)
    if folds < 2:
        raise InputError("need at least 2 folds")
    rng = np.random.default_rng(seed)
    out = np.empty(labels.size, dtype=np.int64)
    offset = 0
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        if idx.size < folds:
            raise InputError(f"class {lab} has {idx.size} rows, fewer than {folds} folds")
        idx = idx[rng.permutation(idx.size)]
        out[idx] = (np.arange(idx.size) + offset) % folds
        offset = (offset + idx.size) % folds
    return out


@dataclass(frozen=True, eq=False)
class EvalReport:
    accuracy: float
    per_class: dict
    mean_auc: float
    auc: dict
    roc_curves: dict
    confusion: ConfusionMatrix
    train_seconds: float
    pred_per_second: float
    folds: int
    meta: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "meta": self.meta,
            "folds": self.folds,
            "rows": self.confusion.total,
            "accuracy": self.accuracy,
            "mean_auc": self.mean_auc,
            "labels": list(self.confusion.labels),
            "per_class": {str(k): v for k, v in self.per_class.items()},
            "auc": {str(k): v for k, v in self.auc.items()},
            "confusion": self.confusion.counts.tolist(),
            "roc": {str(k): v.tolist() for k, v in self.roc_curves.items()},
        }
        if timing:
            out["timing"] = self.timing()
        return out

    def timing(self) -> dict:
        return {
            "train_seconds": round(self.train_seconds, 3),
            "pred_per_second": round(self.pred_per_second, 3),
        }


def report_from_scores(truth, predicted, scores, labels, **extra) -> EvalReport:
    """Aggregate pooled predictions and per-class scores into a report."""
    labels = tuple(labels)
    cm = ConfusionMatrix.from_predictions(truth, predicted, labels)
    per_class, aucs, curves = {}, {}, {}
    truth = np.asarray(truth)
    for i, lab in enumerate(labels):
        m = binary_metrics(cm.one_vs_rest(lab))
        per_class[lab] = {"tpr": m.tpr, "tnr": m.tnr, "ppv": m.ppv}
        curve, auc = roc_auc(scores[:, i], truth == lab)
        aucs[lab] = auc
        curves[lab] = curve
    mean_auc = float(np.mean(list(aucs.values())))
    return EvalReport(
        accuracy=cm.accuracy,
        per_class=per_class,
        mean_auc=mean_auc,
        auc=aucs,
        roc_curves=curves,
        confusion=cm,
        **extra,
    )


def kfold_evaluate(dataset: Dataset, kernel: KernelSpec, gamma: float = 1.0,
                   folds: int = 5, seed: int = 0,
                   options: SolverOptions = SolverOptions()) -> EvalReport:
    """Stratified k-fold cross-validation with pooled out-of-fold metrics."""
    X, y = dataset.features, dataset.labels
    labels = tuple(np.unique(y).tolist())
    if len(labels) < 2:
        raise InputError("evaluation needs at least two classes")
    fold_of = stratified_folds(y, folds, seed)
    predicted = np.empty_like(y)
    scores = np.empty((y.size, len(labels)))
    train_s = pred_s = 0.0
    for f in range(folds):
        test = fold_of == f
        t0 = time.perf_counter()
        model = train_ovo(X[~test], y[~test], kernel, gamma, options, seed=seed)
        t1 = time.perf_counter()
        dec = model.decision_matrix(X[test])
        predicted[test] = vote(dec, model.pairs, model.labels)
        scores[test] = model.class_scores(decisions=dec)
        pred_s += time.perf_counter() - t1
        train_s += t1 - t0
    meta = {"variant": dataset.variant, "kernel": kernel.to_dict(), "gamma": gamma, "seed": seed}
    return report_from_scores(
        y, predicted, scores, labels,
        train_seconds=train_s,
        pred_per_second=y.size / pred_s if pred_s > 0 else float("inf"),
        folds=folds,
        meta=meta,
    )


def benchmark(datasets, kernels, gamma: float = 1.0, folds: int = 5, seed: int = 0,
              options: SolverOptions = SolverOptions()) -> list:
    """One cross-validated cell per (dataset, kernel), all with the same seed."""
    if not datasets:
        raise InputError("benchmark needs at least one dataset")
    cells = []
    for ds in datasets:
        for kernel in kernels:
            rep = kfold_evaluate(ds, kernel, gamma, folds, seed, options)
            cells.append({
                "dataset": ds.variant,
                "rows": len(ds),
                "kernel": kernel.kind,
                "accuracy": rep.accuracy,
                "mean_auc": rep.mean_auc,
                "train_seconds": rep.train_seconds,
                "pred_per_second": rep.pred_per_second,
                "report": rep,
            })
    return cells
