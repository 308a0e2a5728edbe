"""Lagged cross-correlation between two series at several increment steps.

Both series are aligned to a common daily grid (last observation carried
forward), then differenced over non-overlapping step windows.  For lag n in
days, the second series' increments are taken n grid days later, so a
positive extremal lag means the second series trails the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientOverlapError,
    UndefinedCorrelationError,
    ValidationError,
)
from .timeseries import DAYS_PER_YEAR, PriceSeries, locf_indices

DEFAULT_STEPS_DAYS = (7, 30, 90)
DEFAULT_MAX_LAG_DAYS = 90
MIN_PAIRS = 3


@dataclass(frozen=True)
class LagCorrelation:
    """Correlation-vs-lag curves, one per increment step.

    ``coefficients[i, j]`` is the Pearson correlation of step ``steps_days[i]``
    increments of the first series with the second series' increments lagged
    by ``lags_days[j]`` days.  ``extremal_lags[i]`` maximizes the absolute
    coefficient (smallest lag wins ties).
    """

    steps_days: tuple[int, ...]
    lags_days: np.ndarray
    coefficients: np.ndarray
    extremal_lags: np.ndarray
    labels: tuple[str, str]

    def coefficient(self, step_days: int, lag_days: int) -> float:
        i = self.steps_days.index(step_days)
        j = int(np.searchsorted(self.lags_days, lag_days))
        if j >= self.lags_days.size or self.lags_days[j] != lag_days:
            raise ValidationError(f"lag {lag_days} not in the computed range")
        return float(self.coefficients[i, j])

    def table(self) -> list[tuple[int, int, float]]:
        """Long-form rows (step_days, lag_days, coefficient) for plotting."""
        return [
            (step, int(lag), float(self.coefficients[i, j]))
            for i, step in enumerate(self.steps_days)
            for j, lag in enumerate(self.lags_days)
        ]

    def to_record(self) -> dict:
        return {
            "first": self.labels[0],
            "second": self.labels[1],
            "max_lag_days": int(self.lags_days[-1]),
            "steps_days": list(self.steps_days),
            "extremal_lags": {
                str(step): int(self.extremal_lags[i])
                for i, step in enumerate(self.steps_days)
            },
        }


def _pearson(x: np.ndarray, y: np.ndarray, step: int) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    vx = float(xc @ xc)
    vy = float(yc @ yc)
    if vx == 0.0 or vy == 0.0:
        raise UndefinedCorrelationError(
            f"step {step}: an increment sequence has zero variance"
        )
    return float(xc @ yc) / math.sqrt(vx * vy)


def cross_correlation_lag(
    a: PriceSeries,
    b: PriceSeries,
    steps_days=DEFAULT_STEPS_DAYS,
    max_lag_days: int = DEFAULT_MAX_LAG_DAYS,
    on_log: bool = True,
) -> LagCorrelation:
    """Correlate step increments of ``a`` against lagged increments of ``b``.

    For each lag n the increment windows of both series share anchors offset
    by exactly n grid days, which makes the estimate antisymmetric under
    swapping the series: C_ab(n) == C_ba(-n) exactly.
    """
    steps = tuple(int(s) for s in steps_days)
    if not steps or any(s < 1 for s in steps):
        raise ValidationError(f"steps_days must be positive integers, got {steps_days}")
    if max_lag_days < 0:
        raise ValidationError(f"max_lag_days must be >= 0, got {max_lag_days}")

    t0 = max(a.t_first, b.t_first)
    t1 = min(a.t_last, b.t_last)
    n_days = int(math.floor((t1 - t0) * DAYS_PER_YEAR + 1e-9))
    required = max(2 * max_lag_days + max(steps), max_lag_days + MIN_PAIRS * max(steps))
    if n_days < required:
        raise InsufficientOverlapError(
            f"series overlap {n_days} days; need at least {required} for "
            f"max_lag={max_lag_days} and steps {steps}"
        )
    grid = t0 + np.arange(n_days + 1) / DAYS_PER_YEAR
    va = np.log(a.prices) if on_log else a.prices
    vb = np.log(b.prices) if on_log else b.prices
    sa = va[locf_indices(a.times, grid)]
    sb = vb[locf_indices(b.times, grid)]

    lags = np.arange(-max_lag_days, max_lag_days + 1)
    coefficients = np.empty((len(steps), lags.size))
    for i, step in enumerate(steps):
        da = sa[step:] - sa[:-step]  # increment anchored at each grid day
        db = sb[step:] - sb[:-step]
        for j, lag in enumerate(lags):
            anchor = max(0, -int(lag))
            count = (n_days - abs(int(lag))) // step
            ia = anchor + step * np.arange(count)
            coefficients[i, j] = _pearson(da[ia], db[ia + int(lag)], step)
    extremal = lags[np.argmax(np.abs(coefficients), axis=1)]
    return LagCorrelation(
        steps_days=steps,
        lags_days=lags,
        coefficients=coefficients,
        extremal_lags=extremal,
        labels=(a.label, b.label),
    )
