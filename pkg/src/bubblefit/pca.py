"""Common-factor extraction: first principal component of a return panel.

Series are aligned to a common daily grid (last observation carried forward),
log-differenced, and standardized per column, so the component analyzes the
correlation structure.  The leading eigenpair comes from power iteration; a
cumulated index of the component returns is exposed as a price series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError, InsufficientDataError, ValidationError
from .timeseries import DAYS_PER_YEAR, PriceSeries, locf_indices

MIN_OVERLAP_POINTS = 60
EIG_REL_TOL = 1e-10
RESIDUAL_REL_TOL = 1e-10
SEPARATION_REL_TOL = 1e-8
MAX_POWER_ITER = 500_000
COMPONENT_BASE = 100.0


@dataclass(frozen=True)
class AssetPanel:
    """Standardized log-return matrix on a shared daily grid.

    ``matrix[k, i]`` is asset ``i``'s standardized log-return between grid
    times ``times[k]`` and ``times[k + 1]``; every column has zero mean and
    unit sample variance.
    """

    assets: tuple[str, ...]
    times: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[1] < 2:
            raise ValidationError("panel needs a 2-d matrix with at least 2 columns")
        if matrix.shape[1] != len(self.assets):
            raise ValidationError("one label per column required")
        if times.shape != (matrix.shape[0] + 1,):
            raise ValidationError("times must hold one more entry than matrix rows")
        if matrix.shape[0] < 3:
            raise ValidationError("panel needs at least 3 return rows")
        mean = matrix.mean(axis=0)
        var = matrix.var(axis=0, ddof=1)
        if np.any(np.abs(mean) > 1e-9) or np.any(np.abs(var - 1.0) > 1e-9):
            raise ValidationError("columns must be standardized (zero mean, unit variance)")
        times = times.copy()
        matrix = matrix.copy()
        times.setflags(write=False)
        matrix.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n_assets(self) -> int:
        return self.matrix.shape[1]

    @property
    def n_returns(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PrincipalComponent:
    """Leading eigenpair of the panel covariance plus a cumulated index.

    ``weights`` is unit-norm with its largest-magnitude entry positive;
    ``explained_fraction`` is the leading eigenvalue over the covariance
    trace; ``component_series`` cumulates the weighted returns from a base
    level of 100.
    """

    weights: np.ndarray
    eigenvalue: float
    explained_fraction: float
    component_series: PriceSeries

    def to_record(self) -> dict:
        return {
            "eigenvalue": self.eigenvalue,
            "explained_fraction": self.explained_fraction,
            "weights": [float(w) for w in self.weights],
        }


def build_panel(series_list, min_overlap_points: int = MIN_OVERLAP_POINTS) -> AssetPanel:
    """Align series on a common daily grid and standardize their log-returns."""
    series_list = list(series_list)
    if len(series_list) < 2:
        raise ValidationError("panel needs at least 2 series")
    labels = []
    for i, s in enumerate(series_list):
        labels.append(s.label if s.label else f"asset_{i}")
    t0 = max(s.t_first for s in series_list)
    t1 = min(s.t_last for s in series_list)
    n_days = int(math.floor((t1 - t0) * DAYS_PER_YEAR + 1e-9))
    if n_days + 1 < min_overlap_points:
        raise InsufficientDataError(
            f"series overlap on {n_days + 1} grid points; need {min_overlap_points}"
        )
    grid = t0 + np.arange(n_days + 1) / DAYS_PER_YEAR
    columns = []
    for s in series_list:
        levels = np.log(s.prices)[locf_indices(s.times, grid)]
        returns = np.diff(levels)
        sd = returns.std(ddof=1)
        if sd == 0.0:
            raise ValidationError(
                f"series {s.label!r} has constant log-price on the common grid"
            )
        columns.append((returns - returns.mean()) / sd)
    return AssetPanel(assets=tuple(labels), times=grid, matrix=np.column_stack(columns))


def _power_iterate(cov: np.ndarray, v0: np.ndarray, scale: float):
    """Leading eigenpair by power iteration.

    Converges when the eigenvalue estimate settles to :data:`EIG_REL_TOL` and
    the eigen-residual falls below :data:`RESIDUAL_REL_TOL`, both relative to
    ``scale`` (an a-priori bound on the spectrum, so a numerically-zero
    matrix converges immediately to eigenvalue 0 instead of chasing dust).
    """
    v = v0 / np.linalg.norm(v0)
    lam = float(v @ cov @ v)
    for _ in range(MAX_POWER_ITER):
        w = cov @ v
        norm = float(np.linalg.norm(w))
        if norm <= 1e-14 * scale:  # the map is zero along every explored direction
            return v, 0.0
        v = w / norm
        lam_new = float(v @ cov @ v)
        if abs(lam_new - lam) <= EIG_REL_TOL * scale:
            residual = float(np.linalg.norm(cov @ v - lam_new * v))
            if residual <= RESIDUAL_REL_TOL * scale:
                return v, lam_new
        lam = lam_new
    raise DegenerateSpectrumError(
        "power iteration failed to separate the leading eigenvalue"
    )


def first_principal_component(panel: AssetPanel) -> PrincipalComponent:
    """Leading eigenvector, explained fraction, and cumulated component index.

    Raises :class:`DegenerateSpectrumError` when the top two eigenvalues of
    the panel covariance differ by less than :data:`SEPARATION_REL_TOL`
    relative (the leading direction is then not identified).
    """
    X = panel.matrix
    cov = (X.T @ X) / (X.shape[0] - 1)
    k = panel.n_assets
    scale = max(float(np.trace(cov)), 1e-300)
    v0 = np.ones(k) / math.sqrt(k)
    w1, lam1 = _power_iterate(cov, v0, scale)
    if lam1 <= 0:
        raise DegenerateSpectrumError("leading eigenvalue is not positive")

    # Second eigenvalue from the deflated matrix, for the separation check.
    # The all-ones start can sit exactly orthogonal to the true leading
    # eigenvector (e.g. anti-correlated pairs, whose leader alternates signs),
    # trapping the first pass on a lower eigenpair; deflation then exposes a
    # larger eigenvalue, and we hop to it and re-check.  Each hop strictly
    # increases lam1, so k rounds bound the loop.
    lam2 = -math.inf
    for _ in range(k):
        deflated = cov - lam1 * np.outer(w1, w1)
        u0 = v0 - (v0 @ w1) * w1
        if np.linalg.norm(u0) < 1e-8:
            u0 = np.zeros(k)
            u0[int(np.argmin(np.abs(w1)))] = 1.0
            u0 = u0 - (u0 @ w1) * w1
        w2, lam2 = _power_iterate(deflated, u0, scale)
        if lam2 <= lam1 + SEPARATION_REL_TOL * scale:
            break
        w1, lam1 = _power_iterate(cov, w2, scale)
    if (lam1 - lam2) <= SEPARATION_REL_TOL * lam1:
        raise DegenerateSpectrumError(
            f"leading eigenvalues tie: {lam1:.6g} vs {lam2:.6g}"
        )

    imax = int(np.argmax(np.abs(w1)))
    if w1[imax] < 0:
        w1 = -w1
    returns = X @ w1
    levels = COMPONENT_BASE * np.exp(np.concatenate([[0.0], np.cumsum(returns)]))
    component = PriceSeries(times=panel.times, prices=levels, label="pc1")
    return PrincipalComponent(
        weights=w1,
        eigenvalue=lam1,
        explained_fraction=lam1 / float(np.trace(cov)),
        component_series=component,
    )
