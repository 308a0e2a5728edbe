"""Shared builders for synthetic price series used across the test suite."""

import datetime as dt
import sys

import numpy as np
import pytest

from bubblefit import LpplParams, NoiseSpec, PriceSeries, Window, daily_times, synth_lppl

# Canonical bubble used throughout: a clear super-exponential regime with
# visible oscillations, critical time shortly after the window end.
CANONICAL = LpplParams(A=1.0, B=-0.5, C=0.1, m=0.5, omega=8.0, phi=1.0, tc=2000.5)
CANONICAL_WINDOW = Window(t_start=1998.0, t_last=2000.3)


def bubble_series(params=CANONICAL, window=CANONICAL_WINDOW, n=300, sigma=0.0, seed=0,
                  label="synthetic"):
    """Sample an LPPL log-price curve on an even grid, optional Gaussian noise."""
    return synth_lppl(params, window, n, NoiseSpec(sigma=sigma, seed=seed), label=label)


def daily_random_walk(seed=0, n=500, start=dt.date(2000, 1, 3), mu=0.0002,
                      sigma=0.01, p0=100.0, label="walk"):
    """Geometric random walk on consecutive calendar days (CSV-safe dates)."""
    rng = np.random.default_rng(seed)
    log_returns = rng.normal(mu, sigma, n - 1)
    prices = p0 * np.exp(np.concatenate([[0.0], np.cumsum(log_returns)]))
    return PriceSeries(daily_times(start, n), prices, label=label)


@pytest.fixture
def canonical_series():
    return bubble_series()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the per-criterion verdict lines collected by the acceptance tests."""
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance summary")
        for line in lines:
            terminalreporter.write_line(line)
