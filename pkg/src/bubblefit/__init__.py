"""Diagnostics for super-exponential price regimes.

The package calibrates log-periodic power-law models to price histories,
estimates critical times with window-ensemble confidence intervals, detects
crashes by a drawdown rule, measures lagged cross-correlation between
markets, and extracts the first principal component of a return panel.
"""

__version__ = "0.1.0"

from .errors import (
    BubbleFitError,
    CsvParseError,
    DegenerateSpectrumError,
    DegenerateWindowError,
    FitFailureError,
    InsufficientDataError,
    InsufficientEnsembleError,
    InsufficientOverlapError,
    ModelDomainError,
    NoAdmissibleWindowsError,
    UndefinedCorrelationError,
    ValidationError,
)
from .timeseries import (
    DAYS_PER_YEAR,
    CsvConfig,
    PriceSeries,
    Window,
    daily_times,
    date_from_decimal_year,
    decimal_year,
    emit,
    increments,
    load_csv,
    log_prices,
    make_windows,
    resolve_window,
)
from .model import (
    LpplParams,
    NoiseSpec,
    eval_lppl,
    eval_power_law,
    scaling_ratio,
    synth_feedback_ode,
    synth_lppl,
)
from .calibrate import (
    FitConfig,
    FitResult,
    fit_exponential,
    fit_window,
    recover_oscillation,
    solve_linear_subproblem,
)
from .scan import (
    ScanReport,
    SuperExponentialDiagnostic,
    scan_shrinking_windows,
    super_exponential_diagnostic,
)
from .crash import CrashEvent, detect_crashes
from .lagcorr import LagCorrelation, cross_correlation_lag
from .pca import AssetPanel, PrincipalComponent, build_panel, first_principal_component

__all__ = [
    "__version__",
    "BubbleFitError",
    "CsvParseError",
    "DegenerateSpectrumError",
    "DegenerateWindowError",
    "FitFailureError",
    "InsufficientDataError",
    "InsufficientEnsembleError",
    "InsufficientOverlapError",
    "ModelDomainError",
    "NoAdmissibleWindowsError",
    "UndefinedCorrelationError",
    "ValidationError",
    "DAYS_PER_YEAR",
    "CsvConfig",
    "PriceSeries",
    "Window",
    "daily_times",
    "date_from_decimal_year",
    "decimal_year",
    "emit",
    "increments",
    "load_csv",
    "log_prices",
    "make_windows",
    "resolve_window",
    "LpplParams",
    "NoiseSpec",
    "eval_lppl",
    "eval_power_law",
    "scaling_ratio",
    "synth_feedback_ode",
    "synth_lppl",
    "FitConfig",
    "FitResult",
    "fit_exponential",
    "fit_window",
    "recover_oscillation",
    "solve_linear_subproblem",
    "ScanReport",
    "SuperExponentialDiagnostic",
    "scan_shrinking_windows",
    "super_exponential_diagnostic",
    "CrashEvent",
    "detect_crashes",
    "LagCorrelation",
    "cross_correlation_lag",
    "AssetPanel",
    "PrincipalComponent",
    "build_panel",
    "first_principal_component",
]
