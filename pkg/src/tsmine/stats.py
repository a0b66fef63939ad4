"""Descriptive indicators for sensor channels: range, moments, correlation."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateDataError, InputError
from .timeseries import as_values

__all__ = ["StatsSummary", "summarize", "histogram"]


@dataclass(frozen=True)
class StatsSummary:
    """Min/max/mean/sd plus shape moments of one channel.

    ``sd`` uses the sample (n-1) denominator. ``skewness`` and ``kurtosis``
    are plain population moment ratios E(x-mu)^k / sigma^k with the 1/n
    estimator, so a Gaussian sample has kurtosis near 3.
    """

    min: float
    max: float
    mean: float
    sd: float
    skewness: float
    kurtosis: float
    pearson_r: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(series, reference=None) -> StatsSummary:
    """Compute the indicator set, optionally correlating against ``reference``."""
    x = as_values(series)
    if x.size < 2:
        raise InputError("summary statistics need at least 2 samples")
    mu = x.mean()
    dev = x - mu
    m2 = np.mean(dev**2)
    if not m2 > 0.0:
        raise DegenerateDataError("degenerate variance")
    skew = np.mean(dev**3) / m2**1.5
    kurt = np.mean(dev**4) / m2**2
    r = None
    if reference is not None:
        ref = as_values(reference)
        if ref.size != x.size:
            raise InputError(
                f"reference length {ref.size} does not match series length {x.size}"
            )
        rdev = ref - ref.mean()
        denom = np.sqrt(np.sum(dev**2) * np.sum(rdev**2))
        if not denom > 0.0:
            raise DegenerateDataError("degenerate variance in reference channel")
        r = float(np.clip(np.sum(dev * rdev) / denom, -1.0, 1.0))
    return StatsSummary(
        min=float(x.min()),
        max=float(x.max()),
        mean=float(mu),
        sd=float(x.std(ddof=1)),
        skewness=float(skew),
        kurtosis=float(kurt),
        pearson_r=r,
    )


def histogram(series) -> tuple[np.ndarray, np.ndarray]:
    """Counts and bin edges with Freedman-Diaconis bin widths."""
    return np.histogram(as_values(series), bins="fd")
