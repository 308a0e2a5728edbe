"""Tests for lagged cross-correlation of increment series."""

import numpy as np
import pytest

from bubblefit import (
    InsufficientOverlapError,
    PriceSeries,
    UndefinedCorrelationError,
    ValidationError,
    cross_correlation_lag,
)


def grid_times(n, t0=2000.0):
    return t0 + np.arange(n) / 365.25


def walk_prices(seed, n, sigma=0.01, p0=100.0):
    rng = np.random.default_rng(seed)
    return p0 * np.exp(np.concatenate([[0.0], np.cumsum(rng.normal(0.0, sigma, n - 1))]))


def test_planted_shift_recovered_at_every_step():
    # b carries a's exact values 30 grid days later
    n = 900
    pa = walk_prices(seed=1, n=n)
    a = PriceSeries(grid_times(n), pa, label="leader")
    b = PriceSeries(grid_times(n) + 30 / 365.25, pa, label="follower")
    result = cross_correlation_lag(a, b, steps_days=(7, 30, 90), max_lag_days=60)
    for i, step in enumerate(result.steps_days):
        assert result.extremal_lags[i] == 30
        assert result.coefficient(step, 30) == pytest.approx(1.0, abs=1e-12)
        # away from the planted lag the correlation falls off
        assert abs(result.coefficient(step, -30)) < 0.9
    assert result.labels == ("leader", "follower")


def test_lag_zero_self_correlation_is_one():
    n = 400
    a = PriceSeries(grid_times(n), walk_prices(seed=2, n=n))
    result = cross_correlation_lag(a, a, steps_days=(7, 30), max_lag_days=30)
    for step in (7, 30):
        assert result.coefficient(step, 0) == pytest.approx(1.0, abs=1e-13)


def test_swapping_series_mirrors_the_lag_axis_exactly():
    n = 500
    a = PriceSeries(grid_times(n), walk_prices(seed=3, n=n), label="a")
    b = PriceSeries(grid_times(n), walk_prices(seed=4, n=n), label="b")
    ab = cross_correlation_lag(a, b, steps_days=(7, 30), max_lag_days=40)
    ba = cross_correlation_lag(b, a, steps_days=(7, 30), max_lag_days=40)
    # exact antisymmetry: identical anchor sets, so identical floats
    np.testing.assert_array_equal(ab.coefficients, ba.coefficients[:, ::-1])


def test_coefficients_are_valid_correlations():
    n = 600
    a = PriceSeries(grid_times(n), walk_prices(seed=5, n=n))
    b = PriceSeries(grid_times(n), walk_prices(seed=6, n=n))
    result = cross_correlation_lag(a, b)
    assert result.coefficients.shape == (3, 181)  # steps (7,30,90) x lags -90..90
    assert np.all(np.abs(result.coefficients) <= 1.0 + 1e-12)
    assert np.all(np.isfinite(result.coefficients))


def test_zero_variance_increments_raise_and_name_the_step():
    n = 400
    flat = PriceSeries(grid_times(n), np.full(n, 25.0))
    mover = PriceSeries(grid_times(n), walk_prices(seed=7, n=n))
    with pytest.raises(UndefinedCorrelationError, match="7"):
        cross_correlation_lag(flat, mover, steps_days=(7,), max_lag_days=10)


def test_insufficient_overlap_raises():
    a = PriceSeries(grid_times(100), walk_prices(seed=8, n=100))
    b = PriceSeries(grid_times(100), walk_prices(seed=9, n=100))
    with pytest.raises(InsufficientOverlapError):
        cross_correlation_lag(a, b, steps_days=(7, 30, 90), max_lag_days=90)


def test_misaligned_series_use_locf_on_the_common_grid():
    # drop every third observation of b; correlations stay finite and the
    # planted contemporaneous relation (same walk) still peaks at lag 0
    n = 700
    pa = walk_prices(seed=10, n=n)
    times = grid_times(n)
    keep = np.ones(n, dtype=bool)
    keep[::3] = False
    keep[0] = keep[-1] = True
    a = PriceSeries(times, pa)
    b = PriceSeries(times[keep], pa[keep] * 3.0)
    result = cross_correlation_lag(a, b, steps_days=(7, 30), max_lag_days=20)
    for step in (7, 30):
        assert result.extremal_lags[result.steps_days.index(step)] == 0
        assert result.coefficient(step, 0) > 0.9


def test_table_and_record_round_trip():
    n = 500
    a = PriceSeries(grid_times(n), walk_prices(seed=11, n=n), label="x")
    b = PriceSeries(grid_times(n), walk_prices(seed=12, n=n), label="y")
    result = cross_correlation_lag(a, b, steps_days=(7,), max_lag_days=5)
    table = result.table()
    assert len(table) == 11
    assert table[0][:2] == (7, -5)
    assert table[-1][:2] == (7, 5)
    record = result.to_record()
    assert record["first"] == "x" and record["second"] == "y"
    assert record["max_lag_days"] == 5
    assert record["extremal_lags"] == {"7": int(result.extremal_lags[0])}


def test_bad_arguments_rejected():
    n = 500
    a = PriceSeries(grid_times(n), walk_prices(seed=13, n=n))
    with pytest.raises(ValidationError):
        cross_correlation_lag(a, a, steps_days=())
    with pytest.raises(ValidationError):
        cross_correlation_lag(a, a, steps_days=(0,))
    with pytest.raises(ValidationError):
        cross_correlation_lag(a, a, max_lag_days=-1)
