"""Sensor stream cleaning: zero-dropout patching, spline smoothing, z-scores.

The smoothing spline is the cubic spline minimising

    p * sum_i (y_i - f(t_i))**2 + (1 - p) * integral f''(t)**2 dt

on the sample index grid (t_i = i), so ``p`` does not depend on the sampling
cadence. It is solved in Reinsch form with banded linear algebra, O(n).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numba as nb
import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .errors import DegenerateDataError, InputError
from .timeseries import TimeSeries

log = logging.getLogger(__name__)

__all__ = [
    "SmoothingConfig",
    "patch_outliers",
    "smooth",
    "zscore",
    "effective_dof",
    "auto_smoothing_parameter",
]


@dataclass(frozen=True)
class SmoothingConfig:
    """Smoothing spline settings.

    Parameters
    ----------
    smoothing_parameter : float or None
        ``p`` in [0, 1]; 0 gives the least-squares line, 1 the interpolant.
        None selects ``p`` so the spline has ``dof_fraction * n`` effective
        degrees of freedom.
    dof_fraction : float
        Target effective degrees of freedom as a fraction of the length.
    """

    smoothing_parameter: float | None = None
    dof_fraction: float = 0.1

    def __post_init__(self):
        p = self.smoothing_parameter
        if p is not None and not 0.0 <= p <= 1.0:
            raise InputError(f"smoothing parameter must lie in [0, 1], got {p}")
        if not 0.0 < self.dof_fraction <= 1.0:
            raise InputError(f"dof_fraction must lie in (0, 1], got {self.dof_fraction}")


def patch_outliers(series: TimeSeries, eps: float | None = None) -> TimeSeries:
    """Replace zero dropouts with the previous non-zero sample.

    A sample is a dropout when it equals 0.0 exactly, or when ``|x| < eps``
    if ``eps`` is given. Leading dropouts take the first valid value.
    """
    x = series.values
    bad = np.abs(x) < eps if eps is not None else x == 0.0
    if not bad.any():
        return series
    if bad.all():
        raise DegenerateDataError(
            f"channel {series.channel_id!r}: no reference value available"
        )
    idx = np.where(bad, 0, np.arange(x.size))
    np.maximum.accumulate(idx, out=idx)
    first = int(np.argmax(~bad))
    idx[:first] = first
    return series.with_values(x[idx])


def _second_difference_bands(n: int):
    """Q^T Q (pentadiagonal) and R (tridiagonal) on a unit grid, as bands.

    Q is n x (n-2) with columns (1, -2, 1); R has 2/3 on the diagonal and 1/6
    off it. Bands are returned in LAPACK upper form with 2 superdiagonals.
    """
    m = n - 2
    qtq = np.zeros((3, m))
    qtq[2] = 6.0
    qtq[1, 1:] = -4.0
    qtq[0, 2:] = 1.0
    r = np.zeros((3, m))
    r[2] = 2.0 / 3.0
    r[1, 1:] = 1.0 / 6.0
    return qtq, r


def _apply_qt(y: np.ndarray) -> np.ndarray:
    return y[:-2] - 2.0 * y[1:-1] + y[2:]


def _apply_q(g: np.ndarray) -> np.ndarray:
    out = np.zeros(g.size + 2)
    out[:-2] += g
    out[1:-1] -= 2.0 * g
    out[2:] += g
    return out


def _system(n: int, p: float) -> np.ndarray:
    qtq, r = _second_difference_bands(n)
    return p * r + (1.0 - p) * qtq


@nb.njit(cache=True)
def _inverse_band(u):
    """Central 5-band of B^-1 given the upper banded Cholesky factor of B.

    Row 0 holds diag(B^-1), rows 1-2 the first and second superdiagonals.
    """
    m = u.shape[1]
    sig = np.zeros((3, m))
    for i in range(m - 1, -1, -1):
        uii = u[2, i]
        for off in range(2, -1, -1):
            j = i + off
            if j >= m:
                continue
            acc = 0.0
            for k in range(i + 1, min(i + 3, m)):
                uik = u[2 - (k - i), k]
                if k <= j:
                    acc += uik * sig[j - k, k]
                else:
                    acc += uik * sig[k - j, j]
            val = -acc / uii
            if off == 0:
                val += 1.0 / (uii * uii)
            sig[off, i] = val
    return sig


def effective_dof(n: int, p: float) -> float:
    """Trace of the smoother matrix for length ``n`` and parameter ``p``."""
    if n < 4:
        raise InputError("smoothing needs at least 4 samples")
    if p >= 1.0:
        return float(n)
    if p <= 0.0:
        return 2.0
    qtq, _ = _second_difference_bands(n)
    u = cholesky_banded(_system(n, p))
    sig = _inverse_band(u)
    # sig is indexed by row, the LAPACK bands by column
    tr = np.sum(sig[0] * qtq[2]) + 2.0 * np.sum(sig[1, :-1] * qtq[1, 1:])
    tr += 2.0 * np.sum(sig[2, :-2] * qtq[0, 2:])
    return float(n - (1.0 - p) * tr)


@lru_cache(maxsize=64)
def auto_smoothing_parameter(n: int, dof_fraction: float = 0.1) -> float:
    """``p`` whose spline has about ``dof_fraction * n`` degrees of freedom."""
    target = min(max(dof_fraction * n, 2.5), float(n))
    if target >= n:
        return 1.0
    # dof increases with p; bisect on log(lambda), lambda = (1 - p) / p
    lo, hi = -12.0, 16.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        p = 1.0 / (1.0 + 10.0**mid)
        if effective_dof(n, p) > target:
            lo = mid
        else:
            hi = mid
    return 1.0 / (1.0 + 10.0 ** (0.5 * (lo + hi)))


def smooth(series: TimeSeries, cfg: SmoothingConfig | None = None) -> TimeSeries:
    """Cubic smoothing spline evaluated at the sample instants."""
    cfg = cfg or SmoothingConfig()
    y = series.values
    n = y.size
    if n < 4:
        raise InputError(f"channel {series.channel_id!r}: smoothing needs at least 4 samples")
    p = cfg.smoothing_parameter
    if p is None:
        p = auto_smoothing_parameter(n, cfg.dof_fraction)
        log.debug("channel %s: auto smoothing parameter %.6g", series.channel_id, p)
    if p == 1.0:
        return series.with_values(y)
    if p == 0.0:
        t = np.arange(n, dtype=np.float64)
        slope, intercept = np.polyfit(t, y, 1)
        return series.with_values(intercept + slope * t)
    eta = cho_solve_banded((cholesky_banded(_system(n, p)), False), _apply_qt(y))
    return series.with_values(y - (1.0 - p) * _apply_q(eta))


def zscore(series: TimeSeries) -> TimeSeries:
    """Standardise to zero mean and unit sample (n-1) standard deviation."""
    x = series.values
    if x.size < 2:
        raise DegenerateDataError(f"channel {series.channel_id!r}: degenerate variance")
    mu = x.mean()
    sd = x.std(ddof=1)
    if not sd > 0.0 or not np.isfinite(sd):
        raise DegenerateDataError(f"channel {series.channel_id!r}: degenerate variance")
    return series.with_values((x - mu) / sd)
