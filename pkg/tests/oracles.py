"""Independent reference implementations used by several test modules."""

import cvxpy as cp
import numpy as np


def kernel_matrix(kind, A, B, sigma=None):
    # written out element by element on purpose; no shared code with the package
    out = np.empty((len(A), len(B)))
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            if kind == "linear":
                out[i, j] = float(np.dot(a, b))
            elif kind == "cubic":
                out[i, j] = (float(np.dot(a, b)) + 1.0) ** 3
            else:
                out[i, j] = np.exp(-float(np.sum((a - b) ** 2)) / (2.0 * sigma**2))
    return out


SOLVER_CHAIN = [
    ("CLARABEL", dict(tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)),
    ("CLARABEL", dict(tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)),
    ("CVXOPT", dict(abstol=1e-10, reltol=1e-10, feastol=1e-10)),
]


def dual_qp(X, y, C, kind, sigma=None):
    """Soft-margin dual solved by a generic QP solver.

    Returns (alpha, bias). The bias is the mean of y_k - f0(x_k) over free
    vectors, or the midpoint of the interval allowed by the KKT conditions
    when every alpha sits at a bound.
    """
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    K = kernel_matrix(kind, X, X, sigma)
    Q = np.outer(y, y) * K
    a = cp.Variable(len(y))
    prob = cp.Problem(
        cp.Minimize(0.5 * cp.quad_form(a, cp.psd_wrap(Q)) - cp.sum(a)),
        [a >= 0, a <= C, y @ a == 0],
    )
    for solver, opts in SOLVER_CHAIN:
        try:
            prob.solve(solver=solver, **opts)
        except cp.error.SolverError:
            continue
        if prob.status == cp.OPTIMAL:
            break
    else:
        raise RuntimeError("no QP solver reached optimality")
    alpha = np.clip(a.value, 0.0, C)
    f0 = K @ (alpha * y)
    eps = 1e-6 * C
    free = (alpha > eps) & (alpha < C - eps)
    if free.any():
        return alpha, float(np.mean(y[free] - f0[free]))
    lo, hi = -np.inf, np.inf
    for k in range(len(y)):
        bound = y[k] - f0[k]
        at_zero = alpha[k] <= eps
        if (y[k] > 0) == at_zero:
            lo = max(lo, bound)
        else:
            hi = min(hi, bound)
    return alpha, 0.5 * (lo + hi)


def oracle_decision(X, y, C, kind, T, sigma=None):
    alpha, b = dual_qp(X, y, C, kind, sigma)
    return kernel_matrix(kind, np.asarray(T, float), np.asarray(X, float), sigma) @ (alpha * y) + b


def random_problem(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    d = int(rng.integers(1, 3))
    X = rng.normal(size=(n, d))
    y = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    rng.shuffle(y)
    T = rng.normal(size=(20, d))
    C = float(rng.choice([0.5, 1.0, 10.0]))
    return X, y, C, T


def pair_auc(scores, truth):
    """Fraction of concordant positive/negative pairs, ties counted half."""
    pos = [s for s, t in zip(scores, truth) if t]
    neg = [s for s, t in zip(scores, truth) if not t]
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))
