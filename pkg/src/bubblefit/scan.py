"""Critical-time estimation over a shrinking-window ensemble.

All windows share the same last observation; the start date varies over a
grid.  Each admissible window is fitted independently; the spread of fitted
critical times across the ensemble yields an empirical 80% confidence
interval and a histogram of predicted t_c.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calibrate import FitConfig, FitResult, fit_exponential, fit_window
from .errors import DegenerateWindowError, FitFailureError, InsufficientEnsembleError
from .timeseries import DEFAULT_MIN_POINTS, PriceSeries, Window, make_windows

MIN_ENSEMBLE = 3
HISTOGRAM_BINS = 25
# The power-law exponent must clear the search bounds by this margin before a
# window counts as super-exponential (an exponent pinned at a bound means the
# optimizer ran out of room, not that it found curvature).
M_INTERIOR_MARGIN = 0.01


@dataclass(frozen=True)
class ScanReport:
    """Ensemble fit results plus the derived t_c distribution summaries.

    ``ci80`` is the (10%, 90%) empirical quantile pair of ``tc_samples``
    (linear interpolation between order statistics).  The histogram spans the
    configured t_c search interval with :data:`HISTOGRAM_BINS` equal bins.
    """

    t_last: float
    fits: tuple[FitResult, ...]
    tc_samples: np.ndarray
    ci80: tuple[float, float]
    histogram_edges: np.ndarray
    histogram_counts: np.ndarray
    dropped_starts: tuple[float, ...]

    def histogram_table(self) -> np.ndarray:
        """Plot-ready two-column array: bin center, count."""
        centers = 0.5 * (self.histogram_edges[:-1] + self.histogram_edges[1:])
        return np.column_stack([centers, self.histogram_counts.astype(float)])

    def to_record(self) -> dict:
        return {
            "t_last": self.t_last,
            "n_windows": len(self.fits),
            "n_tc_samples": int(self.tc_samples.size),
            "ci80_low": float(self.ci80[0]),
            "ci80_high": float(self.ci80[1]),
            "tc_median": float(np.median(self.tc_samples)),
            "dropped_starts": list(self.dropped_starts),
            "fits": [f.to_record() for f in self.fits],
        }


def scan_shrinking_windows(
    series: PriceSeries,
    t_last: float,
    start_grid,
    model: str = "lppl",
    config: FitConfig = FitConfig(),
    min_points: int = DEFAULT_MIN_POINTS,
) -> ScanReport:
    """Fit every admissible shrinking window and summarize the t_c ensemble.

    Only converged fits with a bubble signature (B < 0) contribute t_c
    samples; fewer than :data:`MIN_ENSEMBLE` usable samples raises
    :class:`InsufficientEnsembleError` carrying the partial fits.
    Per-window results are independent, so growing the start grid never
    changes existing fits.
    """
    windows, dropped = make_windows(series, t_last, start_grid, min_points)
    fits: list[FitResult] = []
    for window in windows:
        try:
            fits.append(fit_window(series, window, model, config))
        except (FitFailureError, DegenerateWindowError):
            continue
    samples = np.array(
        [f.params.tc for f in fits if f.converged and f.params.B < 0.0]
    )
    if samples.size < MIN_ENSEMBLE:
        raise InsufficientEnsembleError(
            f"insufficient ensemble: only {samples.size} usable critical-time "
            f"samples (need {MIN_ENSEMBLE}); the series may lack a bubble signature",
            fits=fits,
        )
    samples.sort()
    ci80 = (
        float(np.quantile(samples, 0.10)),
        float(np.quantile(samples, 0.90)),
    )
    anchor = fits[0].window.t_last
    lo = anchor + config.tc_bounds[0]
    hi = anchor + config.tc_bounds[1]
    counts, edges = np.histogram(samples, bins=HISTOGRAM_BINS, range=(lo, hi))
    return ScanReport(
        t_last=anchor,
        fits=tuple(fits),
        tc_samples=samples,
        ci80=ci80,
        histogram_edges=edges,
        histogram_counts=counts,
        dropped_starts=tuple(dropped),
    )


@dataclass(frozen=True)
class SuperExponentialDiagnostic:
    """Comparison of the power-law fit against the constant-growth benchmark.

    ``flag`` is True when the window grows super-exponentially: the power law
    beats the exponential on RMSE, decelerating-curvature direction is ruled
    out (B < 0), and the exponent sits strictly inside its search bounds.
    """

    rmse_exponential: float
    rmse_power_law: float
    rmse_ratio: float
    m: float
    b: float
    flag: bool

    def to_record(self) -> dict:
        return {
            "rmse_exponential": self.rmse_exponential,
            "rmse_power_law": self.rmse_power_law,
            "rmse_ratio": self.rmse_ratio,
            "m": self.m,
            "b": self.b,
            "super_exponential": self.flag,
        }


def super_exponential_diagnostic(
    series: PriceSeries,
    window: Window | None = None,
    config: FitConfig = FitConfig(),
) -> SuperExponentialDiagnostic:
    """Does the window grow faster than any exponential?"""
    if window is None:
        window = Window(series.t_first, series.t_last)
    exp_fit = fit_exponential(series, window)
    pl_fit = fit_window(series, window, "power_law", config)
    m = pl_fit.params.m
    interior = (
        config.m_bounds[0] + M_INTERIOR_MARGIN
        <= m
        <= config.m_bounds[1] - M_INTERIOR_MARGIN
    )
    flag = pl_fit.rmse < exp_fit.rmse and pl_fit.params.B < 0.0 and interior
    ratio = pl_fit.rmse / exp_fit.rmse if exp_fit.rmse > 0 else float("inf")
    return SuperExponentialDiagnostic(
        rmse_exponential=exp_fit.rmse,
        rmse_power_law=pl_fit.rmse,
        rmse_ratio=ratio,
        m=m,
        b=pl_fit.params.B,
        flag=flag,
    )
