import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsmine import DegenerateDataError, InputError, TimeSeries
from tsmine.stats import histogram, summarize


def naive(x):
    n = len(x)
    mean = sum(x) / n
    var = sum((v - mean) ** 2 for v in x) / (n - 1)
    return min(x), max(x), mean, math.sqrt(var)


def test_symmetric_series_has_zero_skew():
    assert summarize([-2, -1, 0, 1, 2]).skewness == 0.0


def test_self_correlation_is_one():
    x = np.random.default_rng(0).normal(size=100)
    assert summarize(x, x).pearson_r == pytest.approx(1.0, abs=1e-12)


def test_anti_correlation_is_minus_one():
    x = np.random.default_rng(1).normal(size=100)
    assert summarize(x, -x).pearson_r == pytest.approx(-1.0, abs=1e-9)


def test_gaussian_monte_carlo_moments():
    x = np.random.default_rng(2017).standard_normal(100_000)
    s = summarize(x)
    assert s.kurtosis == pytest.approx(3.0, abs=0.1)
    assert s.skewness == pytest.approx(0.0, abs=0.05)


def test_exponential_skewness():
    # exponential distribution: skewness 2, kurtosis 9
    x = np.random.default_rng(3).exponential(size=400_000)
    s = summarize(x)
    assert s.skewness == pytest.approx(2.0, abs=0.1)
    assert s.kurtosis == pytest.approx(9.0, abs=0.6)


def test_moments_are_population_ratios():
    x = [1.0, 2.0, 4.0, 9.0]
    m = sum(x) / 4
    m2 = sum((v - m) ** 2 for v in x) / 4
    m3 = sum((v - m) ** 3 for v in x) / 4
    m4 = sum((v - m) ** 4 for v in x) / 4
    s = summarize(x)
    assert s.skewness == pytest.approx(m3 / m2**1.5, rel=1e-12)
    assert s.kurtosis == pytest.approx(m4 / m2**2, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=50))
def test_basic_stats_match_two_pass(values):
    if max(values) - min(values) < 1e-3:
        return
    s = summarize(values)
    lo, hi, mean, sd = naive(values)
    assert s.min == lo and s.max == hi
    assert s.mean == pytest.approx(mean, rel=1e-12, abs=1e-9)
    assert s.sd == pytest.approx(sd, rel=1e-9)
    assert s.min <= s.mean <= s.max and s.sd >= 0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 100), st.floats(-100, 100), st.integers(0, 2**31))
def test_affine_invariance(a, b, seed):
    x = np.random.default_rng(seed).gamma(2.0, size=200)
    s1, s2 = summarize(x), summarize(a * x + b)
    assert s2.skewness == pytest.approx(s1.skewness, abs=1e-9)
    assert s2.kurtosis == pytest.approx(s1.kurtosis, abs=1e-9)


def test_pearson_bounded():
    rng = np.random.default_rng(4)
    for _ in range(20):
        x, y = rng.normal(size=(2, 30))
        assert -1.0 <= summarize(x, y).pearson_r <= 1.0


def test_no_reference_no_r():
    assert summarize([1.0, 2.0, 3.0]).pearson_r is None


def test_accepts_timeseries():
    s = summarize(TimeSeries(np.array([1.0, 3.0])))
    assert s.mean == 2.0


def test_constant_is_degenerate():
    with pytest.raises(DegenerateDataError, match="degenerate variance"):
        summarize([5.0, 5.0, 5.0])


def test_length_mismatch():
    with pytest.raises(InputError):
        summarize([1.0, 2.0, 3.0], [1.0, 2.0])


def test_too_short():
    with pytest.raises(InputError):
        summarize([1.0])


def test_histogram_counts_everything():
    x = np.random.default_rng(5).normal(size=1000)
    counts, edges = histogram(x)
    assert counts.sum() == 1000
    assert edges.size == counts.size + 1
    assert np.all(np.diff(edges) > 0)
