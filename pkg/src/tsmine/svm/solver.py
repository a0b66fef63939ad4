"""Sequential minimal optimisation for the soft-margin SVM dual.

Solves

    min_a  1/2 a^T Q a - sum(a)   s.t.  0 <= a_i <= C,  sum(y_i a_i) = 0

with Q_ij = y_i y_j k(x_i, x_j). Each step updates the maximal violating pair
(first-order working-set selection). Kernel rows are computed on first use.
Problems up to ``dense_limit`` rows keep every row they touch; larger ones
hold rows in an LRU cache bounded by ``cache_bytes``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numba as nb
import numpy as np

log = logging.getLogger(__name__)

TAU = 1e-12
DENSE_LIMIT = 6000
CACHE_BYTES = 512 * 2**20


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-3
    max_iter: int = 10_000_000
    dense_limit: int = DENSE_LIMIT
    cache_bytes: int = CACHE_BYTES


@dataclass(frozen=True)
class DualSolution:
    alpha: np.ndarray
    bias: float
    iterations: int
    converged: bool
    max_violation: float


@nb.njit(cache=True, inline="always")
def _k(X, i, j, kind, inv2s2):
    d = X.shape[1]
    s = 0.0
    if kind == 2:
        for c in range(d):
            diff = X[i, c] - X[j, c]
            s += diff * diff
        return math.exp(-s * inv2s2)
    for c in range(d):
        s += X[i, c] * X[j, c]
    if kind == 1:
        s += 1.0
        return s * s * s
    return s


@nb.njit(cache=True)
def _fill_row(X, i, kind, inv2s2, out):
    for t in range(X.shape[0]):
        out[t] = _k(X, i, t, kind, inv2s2)


@nb.njit(cache=True)
def gram_matrix(X, kind, inv2s2):
    n = X.shape[0]
    K = np.empty((n, n))
    for i in range(n):
        K[i, i] = _k(X, i, i, kind, inv2s2)
        for j in range(i + 1, n):
            v = _k(X, i, j, kind, inv2s2)
            K[i, j] = v
            K[j, i] = v
    return K


@nb.njit(cache=True)
def _smo(X, y, C, kind, inv2s2, tol, max_iter, n_slots):
    n = X.shape[0]
    alpha = np.zeros(n)
    G = -np.ones(n)
    diag = np.empty(n)
    for t in range(n):
        diag[t] = _k(X, t, t, kind, inv2s2)

    # kernel rows are computed on first use and kept in an LRU cache
    cache = np.empty((n_slots, n))
    slot_of = -np.ones(n, dtype=np.int64)
    owner = -np.ones(n_slots, dtype=np.int64)
    stamp = np.zeros(n_slots, dtype=np.int64)
    clock = 0

    it = 0
    gap = np.inf
    while it < max_iter:
        gmax = -np.inf
        gmin = np.inf
        i = -1
        j = -1
        for t in range(n):
            yt = y[t]
            at = alpha[t]
            v = -yt * G[t]
            if (yt > 0 and at < C) or (yt < 0 and at > 0):
                if v >= gmax:
                    gmax = v
                    i = t
            if (yt > 0 and at > 0) or (yt < 0 and at < C):
                if v <= gmin:
                    gmin = v
                    j = t
        gap = gmax - gmin
        if i < 0 or j < 0 or gap < tol:
            break

        # fetch row i then row j; i was just stamped so j never evicts it
        si = slot_of[i]
        clock += 1
        if si < 0:
            si = np.argmin(stamp)
            if owner[si] >= 0:
                slot_of[owner[si]] = -1
            owner[si] = i
            slot_of[i] = si
            _fill_row(X, i, kind, inv2s2, cache[si])
        stamp[si] = clock
        sj = slot_of[j]
        clock += 1
        if sj < 0:
            sj = np.argmin(stamp)
            if owner[sj] >= 0:
                slot_of[owner[sj]] = -1
            owner[sj] = j
            slot_of[j] = sj
            _fill_row(X, j, kind, inv2s2, cache[sj])
        stamp[sj] = clock
        Ki = cache[si]
        Kj = cache[sj]

        ai_old = alpha[i]
        aj_old = alpha[j]
        kij = Ki[j]
        if y[i] != y[j]:
            quad = diag[i] + diag[j] + 2.0 * (-kij)
            if quad <= 0:
                quad = TAU
            delta = (-G[i] - G[j]) / quad
            diff = ai_old - aj_old
            ai = ai_old + delta
            aj = aj_old + delta
            if diff > 0:
                if aj < 0:
                    aj = 0.0
                    ai = diff
            else:
                if ai < 0:
                    ai = 0.0
                    aj = -diff
            if diff > 0:
                if ai > C:
                    ai = C
                    aj = C - diff
            else:
                if aj > C:
                    aj = C
                    ai = C + diff
        else:
            quad = diag[i] + diag[j] - 2.0 * kij
            if quad <= 0:
                quad = TAU
            delta = (G[i] - G[j]) / quad
            total = ai_old + aj_old
            ai = ai_old - delta
            aj = aj_old + delta
            if total > C:
                if ai > C:
                    ai = C
                    aj = total - C
            else:
                if aj < 0:
                    aj = 0.0
                    ai = total
            if total > C:
                if aj > C:
                    aj = C
                    ai = total - C
            else:
                if ai < 0:
                    ai = 0.0
                    aj = total
        alpha[i] = ai
        alpha[j] = aj
        dai = (ai - ai_old) * y[i]
        daj = (aj - aj_old) * y[j]
        for t in range(n):
            G[t] += y[t] * (dai * Ki[t] + daj * Kj[t])
        it += 1

    # bias: mean of -y G over free vectors, midpoint of the feasible range otherwise
    ub = np.inf
    lb = -np.inf
    acc = 0.0
    nfree = 0
    for t in range(n):
        yg = y[t] * G[t]
        if alpha[t] >= C:
            if y[t] < 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        elif alpha[t] <= 0:
            if y[t] > 0:
                ub = min(ub, yg)
            else:
                lb = max(lb, yg)
        else:
            acc += yg
            nfree += 1
    rho = acc / nfree if nfree > 0 else 0.5 * (ub + lb)
    return alpha, -rho, it, gap


def solve_dual(X: np.ndarray, y: np.ndarray, C: float, kind: int, sigma: float | None,
               options: SolverOptions = SolverOptions()) -> DualSolution:
    """Run SMO on one binary problem with labels ``y`` in {+1, -1}."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = X.shape[0]
    inv2s2 = 1.0 / (2.0 * sigma * sigma) if sigma else 0.0
    if n <= options.dense_limit:
        n_slots = n
    else:
        n_slots = int(max(2, min(n, options.cache_bytes // (8 * n))))
    alpha, bias, it, gap = _smo(X, y, float(C), kind, inv2s2, options.tol,
                                options.max_iter, n_slots)
    converged = gap < options.tol
    if not converged:
        log.warning("SMO stopped after %d updates with KKT violation %.3g", it, gap)
    return DualSolution(alpha, float(bias), int(it), bool(converged), float(gap))
