"""Crash detection by the operational drawdown rule.

An event is a local price maximum (strictly above every other observation
within the horizon on both sides) followed within the horizon by a drop of at
least the threshold fraction.  Events never overlap: scanning resumes after
each trough.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .timeseries import DAYS_PER_YEAR, PriceSeries, date_from_decimal_year

DEFAULT_THRESHOLD = 0.15
DEFAULT_HORIZON_DAYS = 21.0


@dataclass(frozen=True)
class CrashEvent:
    """One peak-to-trough collapse; times in decimal years, duration in days."""

    peak_time: float
    peak_price: float
    trough_time: float
    trough_price: float
    drawdown: float
    duration_days: float

    def to_record(self) -> dict:
        return {
            "peak_date": date_from_decimal_year(self.peak_time).isoformat(),
            "trough_date": date_from_decimal_year(self.trough_time).isoformat(),
            "peak_time": self.peak_time,
            "trough_time": self.trough_time,
            "peak_price": self.peak_price,
            "trough_price": self.trough_price,
            "drawdown": self.drawdown,
            "duration_days": self.duration_days,
        }


def detect_crashes(
    series: PriceSeries,
    threshold: float = DEFAULT_THRESHOLD,
    horizon_days: float = DEFAULT_HORIZON_DAYS,
) -> list[CrashEvent]:
    """Find all non-overlapping crash events, ordered by peak time.

    The trough is the lowest price within the horizon after the peak (first
    occurrence on ties); its drawdown ``(peak - trough) / peak`` is at least
    ``threshold`` by construction.  Peaks near the series edges compare only
    against the neighbors that exist.
    """
    if not 0.0 < threshold < 1.0:
        raise ValidationError(f"threshold must lie in (0, 1), got {threshold}")
    if horizon_days <= 0.0:
        raise ValidationError(f"horizon_days must be positive, got {horizon_days}")
    t = series.times
    p = series.prices
    horizon = horizon_days / DAYS_PER_YEAR
    events: list[CrashEvent] = []
    i = 0
    n = len(series)
    while i < n:
        lo = int(np.searchsorted(t, t[i] - horizon, side="left"))
        hi = int(np.searchsorted(t, t[i] + horizon, side="right"))
        neighbors = np.delete(p[lo:hi], i - lo)
        if neighbors.size == 0 or p[i] > neighbors.max():
            j1 = int(np.searchsorted(t, t[i] + horizon, side="right"))
            if i + 1 < j1:
                k = i + 1 + int(np.argmin(p[i + 1 : j1]))
                if p[k] <= (1.0 - threshold) * p[i]:
                    events.append(
                        CrashEvent(
                            peak_time=float(t[i]),
                            peak_price=float(p[i]),
                            trough_time=float(t[k]),
                            trough_price=float(p[k]),
                            drawdown=float((p[i] - p[k]) / p[i]),
                            duration_days=float((t[k] - t[i]) * DAYS_PER_YEAR),
                        )
                    )
                    i = k + 1
                    continue
        i += 1
    return events
