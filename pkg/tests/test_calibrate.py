"""Tests for windowed curve calibration.

Oracles: the linear subproblem is checked against exact synthetic
constructions and plain OLS statistics; the full nonlinear fit against the
parameters that generated the data.
"""

import math

import numpy as np
import pytest

from bubblefit import (
    FitConfig,
    InsufficientDataError,
    LpplParams,
    ModelDomainError,
    PriceSeries,
    ValidationError,
    Window,
    eval_lppl,
    fit_exponential,
    fit_window,
    recover_oscillation,
    solve_linear_subproblem,
)

from conftest import CANONICAL, CANONICAL_WINDOW, bubble_series

# Smaller grid for the bulk of the tests; the default is exercised separately.
FAST = FitConfig(grid_sizes=(12, 10, 10))

RECORD_KEYS = [
    "model", "a", "b", "c", "m", "omega", "phi", "tc", "rmse", "n_points",
    "t_start", "t_last", "converged", "objective_evals", "no_bubble_signature",
]


# ------------------------------------------------------- linear subproblem

def test_linear_subproblem_recovers_exact_coefficients():
    # y built directly from known coefficients at fixed (tc, m, omega)
    rng = np.random.default_rng(11)
    t = np.sort(rng.uniform(0.0, 9.0, 60))
    tc, m, omega = 10.0, 0.4, 7.0
    dt = tc - t
    f = dt**m
    y = 1.5 + (-0.8) * f + 0.12 * f * np.cos(omega * np.log(dt)) \
        + (-0.05) * f * np.sin(omega * np.log(dt))
    fit = solve_linear_subproblem(t, y, tc, m, omega)
    assert fit.A == pytest.approx(1.5, abs=1e-9)
    assert fit.B == pytest.approx(-0.8, abs=1e-9)
    assert fit.C1 == pytest.approx(0.12, abs=1e-9)
    assert fit.C2 == pytest.approx(-0.05, abs=1e-9)
    assert fit.rmse < 1e-10


def test_linear_subproblem_power_law_variant():
    t = np.linspace(0.0, 9.0, 40)
    y = 2.0 - 0.5 * (10.0 - t) ** 0.6
    fit = solve_linear_subproblem(t, y, 10.0, 0.6, None)
    assert fit.A == pytest.approx(2.0, abs=1e-9)
    assert fit.B == pytest.approx(-0.5, abs=1e-9)
    assert fit.C1 == 0.0 and fit.C2 == 0.0
    assert fit.rmse < 1e-12


def test_linear_subproblem_rejects_tc_inside_window():
    t = np.linspace(0.0, 9.0, 20)
    with pytest.raises(ModelDomainError):
        solve_linear_subproblem(t, np.zeros(20), 8.0, 0.5, 7.0)


def test_linear_subproblem_coverage_matches_ols_theory():
    """(A, B) land within 3 OLS standard errors in >= 95 of 100 noise draws."""
    t = np.linspace(0.0, 9.0, 80)
    tc, m, omega = 10.0, 0.4, 7.0
    dt = tc - t
    f = dt**m
    X = np.column_stack([np.ones_like(t), f, f * np.cos(omega * np.log(dt)),
                         f * np.sin(omega * np.log(dt))])
    beta_true = np.array([1.5, -0.8, 0.12, -0.05])
    clean = X @ beta_true
    XtX_inv = np.linalg.inv(X.T @ X)
    sigma = 0.02
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        y = clean + rng.normal(0.0, sigma, t.size)
        fit = solve_linear_subproblem(t, y, tc, m, omega)
        dof = t.size - 4
        resid_var = (fit.rmse**2) * t.size / dof
        se = np.sqrt(resid_var * np.diag(XtX_inv))
        ok_a = abs(fit.A - beta_true[0]) <= 3 * se[0]
        ok_b = abs(fit.B - beta_true[1]) <= 3 * se[1]
        hits += ok_a and ok_b
    assert hits >= 95


def test_recover_oscillation_round_trips_the_curve():
    # for either sign of B the recovered (C, phi) must rebuild C1, C2
    for B in (-0.7, 0.7):
        for phi_true in (0.0, 1.2, 3.5, 5.9):
            for C_true in (0.05, 0.4):
                C1 = B * C_true * math.cos(phi_true)
                C2 = -B * C_true * math.sin(phi_true)
                C, phi = recover_oscillation(B, C1, C2)
                assert C == pytest.approx(C_true, abs=1e-12)
                assert B * C * math.cos(phi) == pytest.approx(C1, abs=1e-12)
                assert -B * C * math.sin(phi) == pytest.approx(C2, abs=1e-12)
    assert recover_oscillation(-0.5, 0.0, 0.0) == (0.0, 0.0)
    assert recover_oscillation(0.0, 0.3, 0.1) == (0.0, 0.0)


# ------------------------------------------------------- full nonlinear fit

def test_fit_recovers_noiseless_parameters():
    series = bubble_series()  # canonical params, sigma=0
    fit = fit_window(series, CANONICAL_WINDOW, "lppl")
    span = CANONICAL_WINDOW.span_years
    assert fit.converged
    assert fit.rmse < 1e-9
    assert abs(fit.params.tc - CANONICAL.tc) < 0.005 * span
    assert abs(fit.params.m - CANONICAL.m) < 0.02
    assert abs(fit.params.omega - CANONICAL.omega) < 0.2
    assert fit.params.A == pytest.approx(CANONICAL.A, abs=1e-6)
    assert fit.params.B == pytest.approx(CANONICAL.B, abs=1e-6)
    assert fit.params.C == pytest.approx(CANONICAL.C, abs=1e-6)
    assert fit.params.is_bubble
    assert not fit.no_bubble_signature


def test_fit_is_deterministic():
    series = bubble_series(sigma=0.01, seed=3)
    a = fit_window(series, CANONICAL_WINDOW, "lppl", FAST)
    b = fit_window(series, CANONICAL_WINDOW, "lppl", FAST)
    assert a.to_record() == b.to_record()


def test_fitted_curve_reproduces_observations():
    # the reported params must regenerate the observed log prices at the
    # reported rmse -- guards the amplitude/phase recovery conventions
    series = bubble_series(sigma=0.005, seed=5)
    fit = fit_window(series, CANONICAL_WINDOW, "lppl", FAST)
    i0, i1 = fit.window.i0, fit.window.i1
    resid = np.log(series.prices[i0:i1]) - eval_lppl(fit.params, series.times[i0:i1])
    assert math.sqrt(float(resid @ resid) / resid.size) == pytest.approx(fit.rmse, rel=1e-9)


def test_fit_constant_series_is_flat():
    times = 2000.0 + np.arange(60) / 365.25
    series = PriceSeries(times, np.full(60, 42.0))
    fit = fit_window(series, Window(times[0], times[-1]), "lppl", FAST)
    assert fit.rmse < 1e-10
    assert abs(fit.params.B) < 1e-10
    assert fit.params.A == pytest.approx(math.log(42.0), abs=1e-10)
    assert fit.no_bubble_signature


def test_fit_never_loses_to_its_own_coarse_grid():
    series = bubble_series(sigma=0.02, seed=9)
    fit = fit_window(series, CANONICAL_WINDOW, "lppl", FAST)
    i0, i1 = fit.window.i0, fit.window.i1
    t = series.times[i0:i1]
    y = np.log(series.prices[i0:i1])
    tcs, ms, ws = FAST.grid_axes(fit.window.t_last)
    for tc in tcs[::4]:
        for m in ms[::3]:
            for w in ws[::3]:
                node = solve_linear_subproblem(t, y, tc, m, w)
                assert fit.rmse <= node.rmse + 1e-12


def test_lppl_never_worse_than_power_law():
    for seed in (0, 4, 8):
        series = bubble_series(sigma=0.01, seed=seed)
        lppl = fit_window(series, CANONICAL_WINDOW, "lppl", FAST)
        pl = fit_window(series, CANONICAL_WINDOW, "power_law", FAST)
        assert lppl.rmse <= pl.rmse + 1e-12
        assert pl.params.C == 0.0 and pl.params.omega == 0.0


def test_fit_time_translation_equivariance():
    series = bubble_series()
    fit0 = fit_window(series, CANONICAL_WINDOW, "lppl", FAST)
    for delta in (64.0, -128.0):
        shifted = PriceSeries(series.times + delta, series.prices)
        w = Window(CANONICAL_WINDOW.t_start + delta, CANONICAL_WINDOW.t_last + delta)
        fit = fit_window(shifted, w, "lppl", FAST)
        assert abs(fit.params.tc - delta - fit0.params.tc) < 1e-9
        assert abs(fit.params.m - fit0.params.m) < 1e-9
        assert abs(fit.params.omega - fit0.params.omega) < 1e-9
        assert abs(fit.rmse - fit0.rmse) < 1e-9


def test_fit_price_scale_equivariance():
    series = bubble_series()
    fit0 = fit_window(series, CANONICAL_WINDOW, "lppl", FAST)
    for k in (8.0, 3.7):
        scaled = PriceSeries(series.times, series.prices * k)
        fit = fit_window(scaled, CANONICAL_WINDOW, "lppl", FAST)
        assert abs(fit.params.A - math.log(k) - fit0.params.A) < 1e-9
        assert abs(fit.params.B - fit0.params.B) < 1e-9
        assert abs(fit.params.tc - fit0.params.tc) < 1e-9
        assert abs(fit.rmse - fit0.rmse) < 1e-9


def test_fit_flags_anti_bubble_window():
    # B > 0: log-price decelerating toward tc; every candidate keeps B >= 0
    params = LpplParams(A=1.0, B=0.5, C=0.05, m=0.5, omega=8.0, phi=1.0, tc=2000.5)
    series = bubble_series(params=params)
    fit = fit_window(series, CANONICAL_WINDOW, "lppl", FAST)
    assert fit.no_bubble_signature
    assert fit.params.B >= 0.0
    assert not fit.params.is_bubble


def test_fit_requires_eight_points():
    times = 2000.0 + np.arange(7) / 365.25
    series = PriceSeries(times, np.linspace(1.0, 2.0, 7))
    with pytest.raises(InsufficientDataError):
        fit_window(series, Window(times[0], times[-1]), "lppl", FAST)


def test_fit_rejects_unknown_model():
    series = bubble_series()
    with pytest.raises(ValidationError):
        fit_window(series, CANONICAL_WINDOW, "cubic")


def test_fit_record_keys_are_frozen():
    series = bubble_series()
    fit = fit_window(series, CANONICAL_WINDOW, "lppl", FAST)
    assert list(fit.to_record()) == RECORD_KEYS


def test_fit_config_validation():
    with pytest.raises(ValidationError):
        FitConfig(m_bounds=(0.0, 0.9))
    with pytest.raises(ValidationError):
        FitConfig(tc_bounds=(0.5, 0.1))
    with pytest.raises(ValidationError):
        FitConfig(grid_sizes=(1, 5, 5))
    with pytest.raises(ValidationError):
        FitConfig(refine_tol=0.0)


# ------------------------------------------------------- exponential benchmark

def test_fit_exponential_exact_growth():
    times = 2000.0 + np.arange(200) / 365.25
    prices = 30.0 * np.exp(0.138 * (times - times[0]))
    fit = fit_exponential(PriceSeries(times, prices))
    assert fit.growth_rate == pytest.approx(0.138, abs=1e-12)
    assert fit.rmse < 1e-12
    # intercept extrapolates log-price to time zero
    assert fit.intercept + 0.138 * times[0] == pytest.approx(math.log(30.0), abs=1e-9)


def test_fit_exponential_windowed():
    times = 2000.0 + np.arange(100) / 365.25
    prices = np.concatenate([np.full(50, 10.0), 10.0 * np.exp(0.2 * np.arange(50) / 365.25)])
    series = PriceSeries(times, prices)
    fit = fit_exponential(series, Window(times[50], times[-1]))
    assert fit.growth_rate == pytest.approx(0.2 * 365.25 / 365.25, rel=1e-9)
