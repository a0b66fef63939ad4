"""Piecewise aggregate approximation and symbolic aggregate approximation.

PAA frames always span exactly ``n / M`` sample widths. When ``M`` does not
divide ``n`` the samples on a frame boundary contribute to both neighbours in
proportion to their overlap, so no data is dropped and the weighted mean of
the segments equals the mean of the series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import InputError
from .timeseries import TimeSeries, as_values

__all__ = [
    "PaaVector",
    "SaxWord",
    "paa_transform",
    "paa_distance",
    "paa_reconstruct",
    "gaussian_breakpoints",
    "empirical_breakpoints",
    "cell_means",
    "sax_encode",
    "sax_reconstruct",
    "segment_index",
    "compression_factor",
    "to_letters",
]

DEFAULT_W = 10
DEFAULT_A = 6


@dataclass(frozen=True)
class PaaVector:
    segments: np.ndarray
    source_length: int

    def __post_init__(self):
        seg = np.array(self.segments, dtype=np.float64).reshape(-1)
        if not 1 <= seg.size <= self.source_length:
            raise InputError(
                f"segment count {seg.size} must lie in [1, {self.source_length}]"
            )
        seg.setflags(write=False)
        object.__setattr__(self, "segments", seg)

    @property
    def segment_count(self) -> int:
        return self.segments.size


@dataclass(frozen=True)
class SaxWord:
    symbols: np.ndarray
    alphabet_size: int
    breakpoints: np.ndarray
    source_length: int | None = None

    def __post_init__(self):
        sym = np.array(self.symbols, dtype=np.int64).reshape(-1)
        bp = np.array(self.breakpoints, dtype=np.float64).reshape(-1)
        if self.alphabet_size < 2:
            raise InputError(f"alphabet size must be >= 2, got {self.alphabet_size}")
        if bp.size != self.alphabet_size - 1 or np.any(np.diff(bp) <= 0):
            raise InputError("breakpoints must be a strictly increasing list of a-1 values")
        if sym.size and (sym.min() < 0 or sym.max() >= self.alphabet_size):
            raise InputError("symbol outside the alphabet")
        sym.setflags(write=False)
        bp.setflags(write=False)
        object.__setattr__(self, "symbols", sym)
        object.__setattr__(self, "breakpoints", bp)

    @property
    def segment_count(self) -> int:
        return self.symbols.size

    def __str__(self) -> str:
        return to_letters(self.symbols)


def to_letters(symbols) -> str:
    """Render symbol indices as letters, ``0 -> 'a'``."""
    return "".join(chr(ord("a") + int(s)) for s in symbols)


def _frame_weights(n: int, m: int):
    """Per-frame (start, stop, head_w, tail_w) in whole samples.

    Frame i covers [i*n/m, (i+1)*n/m) in sample widths. Computed in units of
    1/m so the boundaries are exact integers.
    """
    lo = np.arange(m, dtype=np.int64) * n
    hi = lo + n
    first = lo // m          # sample holding the frame start
    last = (hi - 1) // m     # sample holding the frame end
    head = (np.minimum((first + 1) * m, hi) - lo) / m
    tail = (hi - np.maximum(last * m, lo)) / m
    return first, last, head, tail


def paa_transform(series, m: int) -> PaaVector:
    """Reduce a series of length n to ``m`` frame means."""
    x = as_values(series)
    n = x.size
    if not 1 <= m <= n:
        raise InputError(f"segment count must lie in [1, {n}], got {m}")
    # means are taken relative to each frame's first sample, so frames that
    # are constant come back bit-exact
    if n % m == 0:
        frames = x.reshape(m, n // m)
        base = frames[:, 0]
        return PaaVector(base + (frames - base[:, None]).mean(axis=1), n)
    first, last, head, tail = _frame_weights(n, m)
    out = np.empty(m)
    for i in range(m):
        f, l = first[i], last[i]
        if f == l:
            out[i] = x[f]
            continue
        d = x[f : l + 1] - x[f]
        inner = d[1:-1].sum() if l > f + 1 else 0.0
        out[i] = x[f] + (inner + tail[i] * d[-1]) * m / n
    return PaaVector(out, n)


def paa_distance(x: PaaVector, y: PaaVector) -> float:
    """sqrt(n/M) * sqrt(sum (x_i - y_i)^2); lower-bounds the Euclidean distance."""
    if x.segment_count != y.segment_count or x.source_length != y.source_length:
        raise InputError("PAA vectors differ in segment count or source length")
    d = x.segments - y.segments
    return float(np.sqrt(x.source_length / x.segment_count) * np.sqrt(np.dot(d, d)))


def segment_index(n: int, m: int) -> np.ndarray:
    """Frame holding the centre of each of ``n`` samples."""
    if not 1 <= m <= n:
        raise InputError(f"segment count must lie in [1, {n}], got {m}")
    return ((2 * np.arange(n, dtype=np.int64) + 1) * m) // (2 * n)


def _expand(values: np.ndarray, n: int, template: TimeSeries | None) -> TimeSeries:
    out = values[segment_index(n, values.size)]
    if template is not None:
        if len(template) != n:
            raise InputError("template length does not match the reconstruction length")
        return template.with_values(out)
    return TimeSeries(out)


def paa_reconstruct(p: PaaVector, n: int | None = None, template=None) -> TimeSeries:
    """Repeat each frame mean over its frame."""
    n = p.source_length if n is None else n
    if n != p.source_length:
        raise InputError(f"reconstruction length {n} != source length {p.source_length}")
    return _expand(p.segments, n, template)


def gaussian_breakpoints(a: int) -> np.ndarray:
    """Standard-normal quantiles splitting the line into ``a`` equiprobable cells."""
    if a < 2:
        raise InputError(f"alphabet size must be >= 2, got {a}")
    return norm.ppf(np.arange(1, a) / a)


def empirical_breakpoints(values, a: int) -> np.ndarray:
    """Quantiles of observed data at probabilities i/a."""
    if a < 2:
        raise InputError(f"alphabet size must be >= 2, got {a}")
    bp = np.quantile(as_values(values), np.arange(1, a) / a)
    if np.any(np.diff(bp) <= 0):
        raise InputError("data too coarse for distinct empirical breakpoints")
    return bp


def cell_means(breakpoints) -> np.ndarray:
    """Mean of a standard normal truncated to each breakpoint cell."""
    edges = np.concatenate(([-np.inf], np.asarray(breakpoints, dtype=np.float64), [np.inf]))
    lo, hi = edges[:-1], edges[1:]
    mass = np.where(hi <= 0, norm.cdf(hi) - norm.cdf(lo), norm.sf(lo) - norm.sf(hi))
    return (norm.pdf(lo) - norm.pdf(hi)) / mass


def sax_encode(p: PaaVector, a: int = DEFAULT_A, breakpoints=None) -> SaxWord:
    """Map each segment to the cell it falls in; ties go to the upper cell."""
    bp = gaussian_breakpoints(a) if breakpoints is None else np.asarray(breakpoints, float)
    symbols = np.searchsorted(bp, p.segments, side="right")
    return SaxWord(symbols, a, bp, p.source_length)


def sax_reconstruct(word: SaxWord, n: int | None = None, template=None) -> TimeSeries:
    """Replace symbols with their cell means, expanded to ``n`` samples."""
    n = word.source_length if n is None else n
    if n is None or n < word.segment_count:
        raise InputError(f"reconstruction length must be >= {word.segment_count}")
    return _expand(cell_means(word.breakpoints)[word.symbols], n, template)


def compression_factor(n: int, w: int) -> float:
    """Samples per window divided by segments per window."""
    return n / w
