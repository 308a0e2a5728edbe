"""Log-periodic power-law (LPPL) curves and synthetic series generators.

The log-price model is

    ln p(t) = A + B (t_c - t)^m [1 + C cos(omega * ln(t_c - t) + phi)]

with 0 < m < 1; ``C = 0`` reduces it to the pure power law.  A bubble
signature additionally requires B < 0 (accelerating log-price into t_c).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelDomainError, ValidationError
from .timeseries import PriceSeries, Window

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LpplParams:
    """Parameter record for the LPPL curve.

    Constraints enforced here: finite fields, 0 < m < 1, omega >= 0, and phi
    normalized into [0, 2*pi).  ``omega == 0`` marks the oscillation-free pure
    power law (always paired with C == 0).  The sign of B and the magnitude of
    C are deliberately left free because fitted windows without a bubble
    signature legitimately produce B >= 0; use :attr:`is_bubble` to test the
    bubble conditions B < 0 and |C| < 1.
    """

    A: float
    B: float
    C: float
    m: float
    omega: float
    phi: float
    tc: float

    def __post_init__(self):
        values = (self.A, self.B, self.C, self.m, self.omega, self.phi, self.tc)
        if not all(map(math.isfinite, values)):
            raise ValidationError(f"parameters must be finite, got {values}")
        if not 0.0 < self.m < 1.0:
            raise ValidationError(f"m must lie in (0, 1), got {self.m}")
        if self.omega < 0.0:
            raise ValidationError(f"omega must be non-negative, got {self.omega}")
        object.__setattr__(self, "phi", self.phi % TWO_PI)

    @property
    def is_bubble(self) -> bool:
        """True when the curve accelerates into t_c with a bounded oscillation."""
        return self.B < 0.0 and abs(self.C) < 1.0


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian noise on log-price: level sigma, deterministic seed."""

    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not math.isfinite(self.sigma) or self.sigma < 0:
            raise ValidationError(f"sigma must be >= 0, got {self.sigma}")


def _check_domain(params: LpplParams, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t >= params.tc):
        raise ModelDomainError(
            f"model is defined for t < t_c = {params.tc}; got t up to {t.max()}"
        )
    return t


def eval_power_law(params: LpplParams, t) -> np.ndarray | float:
    """Log-price of the pure power law A + B (t_c - t)^m (the C = 0 curve)."""
    ts = _check_domain(params, t)
    out = params.A + params.B * (params.tc - ts) ** params.m
    return float(out) if np.isscalar(t) else out


def eval_lppl(params: LpplParams, t) -> np.ndarray | float:
    """Log-price of the LPPL curve at times ``t`` (all strictly before t_c)."""
    ts = _check_domain(params, t)
    dt = params.tc - ts
    osc = 1.0 + params.C * np.cos(params.omega * np.log(dt) + params.phi)
    out = params.A + params.B * dt**params.m * osc
    return float(out) if np.isscalar(t) else out


def scaling_ratio(params: LpplParams | float) -> float:
    """Preferred scaling ratio lambda = exp(2*pi / omega) of the oscillation."""
    omega = params.omega if isinstance(params, LpplParams) else float(params)
    if omega <= 0:
        raise ValidationError(f"scaling ratio needs omega > 0, got {omega}")
    return math.exp(TWO_PI / omega)


def synth_lppl(
    params: LpplParams,
    window: Window,
    n: int,
    noise: NoiseSpec = NoiseSpec(),
    label: str = "synthetic-lppl",
) -> PriceSeries:
    """Sample the LPPL curve on ``n`` equispaced times across ``window``.

    Gaussian noise of level ``noise.sigma`` is added on log-price with a
    deterministic generator, then exponentiated back to prices.
    """
    if n < 2:
        raise ValidationError(f"need at least 2 samples, got {n}")
    if window.t_last >= params.tc:
        raise ModelDomainError(
            f"window end {window.t_last} must precede t_c = {params.tc}"
        )
    times = np.linspace(window.t_start, window.t_last, n)
    y = eval_lppl(params, times)
    if noise.sigma > 0:
        rng = np.random.default_rng(noise.seed)
        y = y + rng.normal(0.0, noise.sigma, size=n)
    return PriceSeries(times=times, prices=np.exp(y), label=label)


def synth_feedback_ode(
    p0: float, c: float, dt: float, n: int, label: str = "feedback-ode"
) -> PriceSeries:
    """Exact trajectory of the positive-feedback equation dp/dt = c p^2.

    The closed form p(t) = p0 / (1 - c p0 t) blows up at t* = 1/(c p0); the
    requested horizon must stay strictly below it.  Along the trajectory the
    quantity 1/p(t) + c t is conserved (it always equals 1/p0).
    """
    if p0 <= 0 or c <= 0:
        raise ValidationError(f"p0 and c must be positive, got p0={p0}, c={c}")
    if dt <= 0 or n < 2:
        raise ValidationError(f"need dt > 0 and n >= 2, got dt={dt}, n={n}")
    t_star = 1.0 / (c * p0)
    horizon = (n - 1) * dt
    if horizon >= t_star:
        raise ModelDomainError(
            f"horizon {horizon} reaches the singularity t* = {t_star}"
        )
    times = dt * np.arange(n)
    prices = p0 / (1.0 - c * p0 * times)
    return PriceSeries(times=times, prices=prices, label=label)
