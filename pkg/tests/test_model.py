"""Tests for the model curves, parameter container, and synthetic generators.

The reference values below were computed independently with 50-digit
mpmath arithmetic and frozen here.
"""

import numpy as np
import pytest

from bubblefit import (
    LpplParams,
    ModelDomainError,
    NoiseSpec,
    ValidationError,
    Window,
    eval_lppl,
    eval_power_law,
    scaling_ratio,
    synth_feedback_ode,
    synth_lppl,
)

# mpmath (dps=50) frozen values: log-price of the oscillating curve
# A=1, B=-0.5, C=0.1, m=0.5, omega=8, phi=0, tc=100
OSC = LpplParams(A=1.0, B=-0.5, C=0.1, m=0.5, omega=8.0, phi=0.0, tc=100.0)
OSC_VALUES = {
    96.0: -0.00946387570399877399,
    99.0: 0.44999999999999999722,
    99.9: 0.82750670161591651505,
}

# A=2, B=-1, C=-0.3, m=0.3, omega=12, phi=2, tc=2010
OSC2 = LpplParams(A=2.0, B=-1.0, C=-0.3, m=0.3, omega=12.0, phi=2.0, tc=2010.0)
OSC2_VALUES = {
    2008.0: 0.53724512703790444903,
    2009.5: 1.4312776389895089882,
}

# pure power law A=2, B=-1, m=0.3, tc=2010 at t=2008: 2 - 2^0.3
PL2_AT_2008 = 0.76885558665508372497

# scaling ratio exp(2*pi/omega)
LAMBDA_8 = 2.1932800507380154566
LAMBDA_636 = 2.6856484793480568576


# ---------------------------------------------------------------- parameters

def test_params_validation_bounds():
    good = dict(A=1.0, B=-0.5, C=0.1, m=0.5, omega=8.0, phi=0.0, tc=100.0)
    LpplParams(**good)
    for bad in (dict(m=0.0), dict(m=1.0), dict(m=-0.2), dict(omega=-1.0),
                dict(tc=np.nan), dict(A=np.inf)):
        with pytest.raises(ValidationError):
            LpplParams(**{**good, **bad})


def test_params_phase_normalized_to_two_pi():
    p = LpplParams(A=0.0, B=-1.0, C=0.0, m=0.5, omega=8.0, phi=7.0, tc=1.0)
    assert 0.0 <= p.phi < 2 * np.pi
    assert p.phi == pytest.approx(7.0 - 2 * np.pi)
    q = LpplParams(A=0.0, B=-1.0, C=0.0, m=0.5, omega=8.0, phi=-1.0, tc=1.0)
    assert q.phi == pytest.approx(2 * np.pi - 1.0)


def test_is_bubble_requires_negative_b_and_bounded_oscillation():
    base = dict(A=1.0, C=0.1, m=0.5, omega=8.0, phi=0.0, tc=100.0)
    assert LpplParams(B=-0.5, **base).is_bubble
    assert not LpplParams(B=0.5, **base).is_bubble
    assert not LpplParams(B=-0.5, **{**base, "C": 1.5}).is_bubble


# ---------------------------------------------------------------- evaluation

def test_eval_lppl_matches_frozen_values():
    for t, expected in OSC_VALUES.items():
        assert eval_lppl(OSC, t) == pytest.approx(expected, abs=1e-12)
    for t, expected in OSC2_VALUES.items():
        assert eval_lppl(OSC2, t) == pytest.approx(expected, abs=1e-12)


def test_eval_lppl_vectorized_matches_scalar():
    ts = np.array(sorted(OSC_VALUES))
    vec = eval_lppl(OSC, ts)
    np.testing.assert_allclose(vec, [OSC_VALUES[t] for t in ts], atol=1e-12)


def test_eval_power_law_matches_frozen_value():
    pl2 = LpplParams(A=2.0, B=-1.0, C=0.0, m=0.3, omega=0.0, phi=0.0, tc=2010.0)
    assert eval_power_law(pl2, 2008.0) == pytest.approx(PL2_AT_2008, abs=1e-12)
    # the oscillating curve with C=0 collapses onto the power law
    assert eval_lppl(pl2, 2008.0) == pytest.approx(PL2_AT_2008, abs=1e-12)
    # A=1, B=-0.5, m=0.5, tc=100 at t=96: 1 - 0.5 * 4^0.5 == 0 exactly
    pl1 = LpplParams(A=1.0, B=-0.5, C=0.0, m=0.5, omega=0.0, phi=0.0, tc=100.0)
    assert eval_power_law(pl1, 96.0) == 0.0


def test_eval_rejects_times_at_or_past_critical():
    with pytest.raises(ModelDomainError):
        eval_lppl(OSC, 100.0)
    with pytest.raises(ModelDomainError):
        eval_lppl(OSC, np.array([99.0, 100.5]))


def test_scaling_ratio_frozen_values():
    assert scaling_ratio(8.0) == pytest.approx(LAMBDA_8, rel=1e-15)
    assert scaling_ratio(6.36) == pytest.approx(LAMBDA_636, rel=1e-15)
    assert scaling_ratio(OSC) == pytest.approx(LAMBDA_8, rel=1e-15)
    with pytest.raises(ValidationError):
        scaling_ratio(0.0)


def test_scaling_ratio_means_self_similar_oscillations():
    # distances to tc scaled by lambda advance the log-periodic phase by 2*pi:
    # the oscillation factor is identical at dt and dt/lambda
    lam = scaling_ratio(OSC)
    for dt_years in (4.0, 1.0, 0.3):
        a = np.cos(OSC.omega * np.log(dt_years))
        b = np.cos(OSC.omega * np.log(dt_years / lam))
        assert a == pytest.approx(b, abs=1e-12)


# ---------------------------------------------------------------- generators

def test_synth_lppl_samples_the_curve_exactly():
    window = Window(t_start=90.0, t_last=99.5)
    series = synth_lppl(OSC, window, n=50)
    assert len(series) == 50
    assert series.t_first == 90.0
    assert series.t_last == 99.5
    np.testing.assert_allclose(np.log(series.prices), eval_lppl(OSC, series.times),
                               rtol=1e-12)


def test_synth_lppl_noise_is_seeded_and_reproducible():
    window = Window(t_start=90.0, t_last=99.5)
    a = synth_lppl(OSC, window, n=50, noise=NoiseSpec(sigma=0.01, seed=7))
    b = synth_lppl(OSC, window, n=50, noise=NoiseSpec(sigma=0.01, seed=7))
    c = synth_lppl(OSC, window, n=50, noise=NoiseSpec(sigma=0.01, seed=8))
    np.testing.assert_array_equal(a.prices, b.prices)
    assert not np.array_equal(a.prices, c.prices)
    # noise perturbs log prices around the clean curve at the right scale
    resid = np.log(a.prices) - eval_lppl(OSC, a.times)
    assert 0.003 < resid.std() < 0.03


def test_synth_lppl_rejects_window_reaching_tc():
    with pytest.raises(ModelDomainError):
        synth_lppl(OSC, Window(t_start=90.0, t_last=100.0), n=20)


def test_feedback_ode_frozen_values():
    # dp/dt = c p^2 has the exact solution p(t) = p0 / (1 - c p0 t),
    # diverging at t* = 1/(c p0).  p0=100, c=0.001 -> t* = 10.
    series = synth_feedback_ode(p0=100.0, c=0.001, dt=2.5, n=3)
    np.testing.assert_allclose(series.prices, [100.0, 133.33333333333333333, 200.0],
                               rtol=1e-14)
    # near the singularity, cancellation in 1 - c*p0*t costs ~2 digits
    series = synth_feedback_ode(p0=100.0, c=0.001, dt=9.9, n=2)
    assert series.prices[1] == pytest.approx(10000.0, rel=1e-13)


def test_feedback_ode_conservation_law():
    # 1/p(t) + c*t is constant (= 1/p0) along every trajectory
    series = synth_feedback_ode(p0=50.0, c=0.004, dt=0.25, n=18)
    t = series.times - series.times[0]
    conserved = 1.0 / series.prices + 0.004 * t
    np.testing.assert_allclose(conserved, 1.0 / 50.0, rtol=1e-12)


def test_feedback_ode_rejects_horizon_past_singularity():
    with pytest.raises(ModelDomainError):
        synth_feedback_ode(p0=100.0, c=0.001, dt=1.0, n=11)  # reaches t* = 10
