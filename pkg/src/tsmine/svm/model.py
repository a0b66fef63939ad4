"""Binary soft-margin SVMs and the one-vs-one multiclass wrapper."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ..errors import InputError
from .kernels import KernelSpec, cross_kernel
from .solver import SolverOptions, solve_dual

PRUNE_BELOW = 1e-8
PREDICT_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class BinarySvm:
    """Trained two-class machine.

    ``dual_coefficients`` carry the class sign: positive for the first label
    of ``class_pair`` (the lower label, mapped to +1), negative for the other.
    """

    support_vectors: np.ndarray
    dual_coefficients: np.ndarray
    bias: float
    kernel: KernelSpec
    class_pair: tuple
    penalty: float
    iterations: int = 0
    converged: bool = True

    def __post_init__(self):
        sv = np.atleast_2d(np.asarray(self.support_vectors, dtype=np.float64))
        coef = np.asarray(self.dual_coefficients, dtype=np.float64).reshape(-1)
        if sv.shape[0] != coef.size or coef.size == 0:
            raise InputError("need one dual coefficient per support vector")
        if self.kernel.auto_scale:
            raise InputError("a trained machine needs a resolved kernel")
        object.__setattr__(self, "support_vectors", sv)
        object.__setattr__(self, "dual_coefficients", coef)
        object.__setattr__(self, "class_pair", tuple(self.class_pair))

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]

    def decision_function(self, X) -> np.ndarray:
        """f(x) = sum_j coef_j k(sv_j, x) + b for each row of ``X``."""
        X = _as_matrix(X, self.n_features)
        out = np.empty(X.shape[0])
        for lo in range(0, X.shape[0], PREDICT_CHUNK):
            kx = cross_kernel(self.kernel, X[lo:lo + PREDICT_CHUNK], self.support_vectors)
            out[lo:lo + PREDICT_CHUNK] = kx @ self.dual_coefficients + self.bias
        return out

    def predict(self, X) -> np.ndarray:
        pos, neg = self.class_pair
        return np.where(self.decision_function(X) >= 0, pos, neg)


@dataclass(frozen=True, eq=False)
class OvoModel:
    classifiers: list
    labels: tuple
    kernel: KernelSpec = field(default_factory=KernelSpec.fine_gaussian)

    def __post_init__(self):
        k = len(self.labels)
        if len(self.classifiers) != k * (k - 1) // 2:
            raise InputError(f"{k} labels need {k * (k - 1) // 2} pairwise classifiers")

    @property
    def n_features(self) -> int:
        return self.classifiers[0].n_features

    @property
    def pairs(self) -> list:
        return [c.class_pair for c in self.classifiers]

    def decision_matrix(self, X) -> np.ndarray:
        """Decision values, one column per pairwise classifier."""
        X = _as_matrix(X, self.n_features)
        return np.column_stack([c.decision_function(X) for c in self.classifiers])

    def class_scores(self, X=None, decisions=None) -> np.ndarray:
        """Per-label sum of signed margins from the classifiers involving it."""
        if decisions is None:
            decisions = self.decision_matrix(X)
        return class_scores(decisions, self.pairs, self.labels)

    def predict(self, X) -> np.ndarray:
        return vote(self.decision_matrix(X), self.pairs, self.labels)


def _as_matrix(X, n_features: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != n_features:
        raise InputError(f"dimension mismatch: model has {n_features} features, got {X.shape[1]}")
    return X


def vote(decisions: np.ndarray, pairs, labels) -> np.ndarray:
    """Majority vote over pairwise decisions.

    Ties go to the label with the larger summed |margin| over the votes it
    won, then to the smallest label.
    """
    decisions = np.atleast_2d(decisions)
    labels = list(labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    n = decisions.shape[0]
    votes = np.zeros((n, len(labels)))
    margin = np.zeros((n, len(labels)))
    for col, (a, b) in enumerate(pairs):
        f = decisions[:, col]
        win_a = f >= 0
        votes[:, pos[a]] += win_a
        votes[:, pos[b]] += ~win_a
        margin[:, pos[a]] += np.where(win_a, np.abs(f), 0.0)
        margin[:, pos[b]] += np.where(win_a, 0.0, np.abs(f))
    top = votes.max(axis=1, keepdims=True)
    tied_margin = np.where(votes == top, margin, -np.inf)
    cand = tied_margin == tied_margin.max(axis=1, keepdims=True)
    order = np.argsort(labels, kind="stable")
    best = order[np.argmax(cand[:, order], axis=1)]
    return np.asarray(labels)[best]


def class_scores(decisions: np.ndarray, pairs, labels) -> np.ndarray:
    """Per-label sum of signed margins from the classifiers involving it."""
    decisions = np.atleast_2d(decisions)
    pos = {lab: i for i, lab in enumerate(labels)}
    scores = np.zeros((decisions.shape[0], len(labels)))
    for col, (a, b) in enumerate(pairs):
        scores[:, pos[a]] += decisions[:, col]
        scores[:, pos[b]] -= decisions[:, col]
    return scores


def train_binary(X, labels, kernel: KernelSpec, gamma: float = 1.0,
                 options: SolverOptions = SolverOptions(), class_pair=(1, -1),
                 seed: int = 0) -> BinarySvm:
    """Fit a two-class machine; ``labels`` are +1 / -1.

    ``gamma`` is the slack penalty. An auto-scaled kernel is resolved on ``X``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise InputError("feature matrix rows must match the label count")
    if not gamma > 0:
        raise InputError(f"penalty must be positive, got {gamma}")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise InputError("binary labels must be +1 or -1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise InputError("training data must contain both classes")
    kernel = kernel.resolve(X, seed=seed)
    sol = solve_dual(X, y, gamma, kernel.code, kernel.gaussian_sigma, options)
    keep = sol.alpha > PRUNE_BELOW
    if not keep.any():
        raise InputError("solver returned no support vectors")
    return BinarySvm(
        support_vectors=X[keep].copy(),
        dual_coefficients=sol.alpha[keep] * y[keep],
        bias=sol.bias,
        kernel=kernel,
        class_pair=tuple(class_pair),
        penalty=float(gamma),
        iterations=sol.iterations,
        converged=sol.converged,
    )


def train_ovo(X, labels, kernel: KernelSpec, gamma: float = 1.0,
              options: SolverOptions = SolverOptions(), seed: int = 0) -> OvoModel:
    """One machine per unordered label pair, each fit on that pair's rows only."""
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels).reshape(-1)
    if X.ndim != 2 or X.shape[0] != labels.size:
        raise InputError("feature matrix rows must match the label count")
    uniq, counts = np.unique(labels, return_counts=True)
    if uniq.size < 2:
        raise InputError("need at least two classes")
    small = uniq[counts < 2]
    if small.size:
        raise InputError(f"classes with fewer than 2 rows: {small.tolist()}")
    kernel = kernel.resolve(X, seed=seed)
    machines = []
    for a, b in combinations(uniq.tolist(), 2):
        rows = (labels == a) | (labels == b)
        y = np.where(labels[rows] == a, 1.0, -1.0)
        machines.append(train_binary(X[rows], y, kernel, gamma, options, (a, b)))
    return OvoModel(machines, tuple(uniq.tolist()), kernel)


def predict(model: OvoModel, x):
    """Label for a single feature vector, or an array of labels for a matrix."""
    x = np.asarray(x, dtype=np.float64)
    out = model.predict(x)
    return out[0] if x.ndim == 1 else out
