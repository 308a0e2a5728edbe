"""LPPL and power-law calibration on windowed price series.

The model is linear in (A, B, B*C*cos(phi), -B*C*sin(phi)) once the nonlinear
triple (t_c, m, omega) is fixed, so each candidate triple costs one small
least-squares solve.  The fit runs a coarse grid over the triple, then refines
the best nodes (plus a pure power-law warm start) with deterministic
coordinate-wise golden-section searches.  All internal arithmetic anchors time
at the window end and normalizes prices by the window-end price, which keeps
the objective invariant under time translation and price scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateWindowError,
    FitFailureError,
    InsufficientDataError,
    ModelDomainError,
    ValidationError,
)
from .model import TWO_PI, LpplParams
from .timeseries import PriceSeries, Window, resolve_window

# Rank-deficiency threshold on the design-matrix condition number.
COND_LIMIT = 1e12
# t_c is searched strictly after the window end; offsets below this floor
# (about 30 seconds) would put the singularity inside float noise of the
# last observation.
TC_OFFSET_FLOOR = 1e-6
# The refinement simplex must collapse below this fraction of each axis range
# before the fit is declared converged.
LINE_TOL_FRACTION = 1e-6
# Absolute floor on the RMSE-spread stopping test; below double noise further
# "improvements" are meaningless.
RMSE_IMPROVEMENT_FLOOR = 1e-15

MODELS = ("lppl", "power_law")


class LinearFit(NamedTuple):
    """Solution of the linear subproblem at fixed (t_c, m, omega)."""

    A: float
    B: float
    C1: float
    C2: float
    rmse: float


class ExponentialFit(NamedTuple):
    """Ordinary least squares of log-price on time."""

    growth_rate: float
    intercept: float
    rmse: float


@dataclass(frozen=True)
class FitConfig:
    """Search bounds and optimizer knobs for :func:`fit_window`.

    ``tc_bounds`` are offsets in years past the window end (the critical time
    is always searched strictly after the last observation; a lower bound of
    0.0 is nudged to a small positive floor).  ``grid_sizes`` are the coarse
    grid node counts along (t_c, m, omega).  Refinement stops when the simplex
    RMSE spread falls below ``refine_tol`` relative (with a machine-noise
    absolute floor) and the simplex has collapsed spatially, or after
    ``refine_max_iter`` iterations.
    """

    m_bounds: tuple[float, float] = (0.01, 0.99)
    omega_bounds: tuple[float, float] = (2.0, 25.0)
    tc_bounds: tuple[float, float] = (0.0, 0.5)
    grid_sizes: tuple[int, int, int] = (20, 15, 15)
    refine_tol: float = 1e-8
    refine_max_iter: int = 500
    refine_starts: int = 5

    def __post_init__(self):
        if not 0.0 < self.m_bounds[0] < self.m_bounds[1] < 1.0:
            raise ValidationError(f"m_bounds must satisfy 0 < lo < hi < 1: {self.m_bounds}")
        if not 0.0 < self.omega_bounds[0] < self.omega_bounds[1]:
            raise ValidationError(f"omega_bounds must satisfy 0 < lo < hi: {self.omega_bounds}")
        if not 0.0 <= self.tc_bounds[0] < self.tc_bounds[1]:
            raise ValidationError(f"tc_bounds must satisfy 0 <= lo < hi: {self.tc_bounds}")
        if any(g < 2 for g in self.grid_sizes):
            raise ValidationError(f"grid_sizes must all be >= 2: {self.grid_sizes}")
        if self.refine_tol <= 0 or self.refine_max_iter < 1 or self.refine_starts < 1:
            raise ValidationError("refine_tol, refine_max_iter, refine_starts must be positive")

    def tc_offsets(self) -> np.ndarray:
        lo = max(self.tc_bounds[0], TC_OFFSET_FLOOR)
        return np.linspace(lo, self.tc_bounds[1], self.grid_sizes[0])

    def m_nodes(self) -> np.ndarray:
        return np.linspace(self.m_bounds[0], self.m_bounds[1], self.grid_sizes[1])

    def omega_nodes(self) -> np.ndarray:
        return np.linspace(self.omega_bounds[0], self.omega_bounds[1], self.grid_sizes[2])

    def grid_axes(self, t_last: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Absolute coarse-grid nodes (t_c, m, omega) for a window ending at t_last."""
        return t_last + self.tc_offsets(), self.m_nodes(), self.omega_nodes()


@dataclass(frozen=True)
class FitResult:
    """Outcome of a windowed fit.

    ``converged`` reports whether refinement met its tolerance before the
    sweep limit; ``objective_evals`` counts linear-subproblem solves;
    ``no_bubble_signature`` is set when every refined candidate came back with
    B >= 0 (decelerating log-price, nothing to extrapolate to a crash).
    """

    params: LpplParams
    rmse: float
    n_points: int
    window: Window
    converged: bool
    objective_evals: int
    model: str
    no_bubble_signature: bool

    def to_record(self) -> dict:
        """Flat key-value form with frozen key names (see README)."""
        return {
            "model": self.model,
            "a": self.params.A,
            "b": self.params.B,
            "c": self.params.C,
            "m": self.params.m,
            "omega": self.params.omega,
            "phi": self.params.phi,
            "tc": self.params.tc,
            "rmse": self.rmse,
            "n_points": self.n_points,
            "t_start": self.window.t_start,
            "t_last": self.window.t_last,
            "converged": self.converged,
            "objective_evals": self.objective_evals,
            "no_bubble_signature": self.no_bubble_signature,
        }


def _lstsq_columns(columns: list[np.ndarray], y: np.ndarray) -> tuple[np.ndarray, float]:
    """Least squares on the given design columns; RMSE of the residual.

    Raises :class:`DegenerateWindowError` when the design matrix condition
    number exceeds :data:`COND_LIMIT`.
    """
    X = np.column_stack(columns)
    beta, _, _, sv = np.linalg.lstsq(X, y, rcond=None)
    if sv[-1] <= 0.0 or sv[0] > COND_LIMIT * sv[-1]:
        raise DegenerateWindowError(
            f"design matrix condition number exceeds {COND_LIMIT:g}"
        )
    r = y - X @ beta
    return beta, math.sqrt(float(r @ r) / y.size)


def _subproblem(dt: np.ndarray, y: np.ndarray, m: float, omega: float | None):
    """Linear solve at fixed nonlinear parameters; dt = t_c - t must be > 0."""
    f = dt**m
    ones = np.ones_like(dt)
    if omega is None:
        return _lstsq_columns([ones, f], y)
    ln = np.log(dt)
    return _lstsq_columns([ones, f, f * np.cos(omega * ln), f * np.sin(omega * ln)], y)


def solve_linear_subproblem(
    times: np.ndarray,
    log_prices: np.ndarray,
    tc: float,
    m: float,
    omega: float | None,
) -> LinearFit:
    """Best (A, B, C1, C2) for fixed (t_c, m, omega) on windowed log-prices.

    The model is  A + B f + C1 f cos(omega ln dt) + C2 f sin(omega ln dt)
    with f = dt^m and dt = t_c - t.  Pass ``omega=None`` for the pure
    power-law subproblem (C1 = C2 = 0).
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(log_prices, dtype=float)
    if t.ndim != 1 or t.shape != y.shape or t.size < 3:
        raise ValidationError("times and log_prices must be equal-length 1-d arrays (n >= 3)")
    dt = tc - t
    if np.any(dt <= 0):
        raise ModelDomainError(f"t_c = {tc} must lie strictly after every observation")
    beta, rmse = _subproblem(dt, y, m, omega)
    if omega is None:
        return LinearFit(float(beta[0]), float(beta[1]), 0.0, 0.0, rmse)
    return LinearFit(float(beta[0]), float(beta[1]), float(beta[2]), float(beta[3]), rmse)


def recover_oscillation(B: float, C1: float, C2: float) -> tuple[float, float]:
    """Amplitude C >= 0 and phase phi in [0, 2*pi) from the linear solution.

    The sign of B is folded into the phase so that evaluating the recovered
    (C, phi) reproduces the fitted curve exactly:
    B*C*cos(phi) = C1 and -B*C*sin(phi) = C2.
    """
    amp = math.hypot(C1, C2)
    if amp == 0.0 or B == 0.0:
        return 0.0, 0.0
    sgn = 1.0 if B > 0 else -1.0
    phi = math.atan2(-C2 * sgn, C1 * sgn) % TWO_PI
    return amp / abs(B), phi


def _nelder_mead(fun, x0, steps, bounds, f_tol: float, max_iter: int):
    """Deterministic bound-clipped Nelder-Mead simplex minimization.

    The initial simplex, reflection coefficients, and tie-breaking are all
    fixed, so identical objectives reproduce identical paths.  The best vertex
    never worsens, so the result is never above ``fun(x0)``.  Stops when the
    simplex f-spread falls below ``f_tol`` relative (with a machine-noise
    floor) and the simplex has collapsed spatially.
    """
    n = len(x0)
    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5

    def clip(x):
        return [min(max(v, lo), hi) for v, (lo, hi) in zip(x, bounds)]

    verts = [list(x0)]
    for i in range(n):
        v = list(x0)
        v[i] = v[i] + steps[i] if v[i] + steps[i] <= bounds[i][1] else v[i] - steps[i]
        verts.append(clip(v))
    fs = [fun(v) for v in verts]

    converged = False
    for _ in range(max_iter):
        order = sorted(range(n + 1), key=lambda i: (fs[i], verts[i]))
        verts = [verts[i] for i in order]
        fs = [fs[i] for i in order]
        f_spread = fs[-1] - fs[0]
        x_spread = max(
            max(abs(verts[j][i] - verts[0][i]) for j in range(1, n + 1))
            / (bounds[i][1] - bounds[i][0])
            for i in range(n)
        )
        if (
            f_spread <= max(f_tol * abs(fs[0]), RMSE_IMPROVEMENT_FLOOR)
            and x_spread <= LINE_TOL_FRACTION
        ):
            converged = True
            break
        if not all(map(math.isfinite, fs[:-1])):
            # degenerate vertices poison the centroid: shrink toward the best
            for j in range(1, n + 1):
                verts[j] = clip(
                    [b + sigma * (v - b) for v, b in zip(verts[j], verts[0])]
                )
                fs[j] = fun(verts[j])
            continue
        centroid = [
            sum(verts[j][i] for j in range(n)) / n for i in range(n)
        ]
        worst = verts[-1]
        xr = clip([c + alpha * (c - w) for c, w in zip(centroid, worst)])
        fr = fun(xr)
        if fr < fs[0]:
            xe = clip([c + gamma * (r - c) for c, r in zip(centroid, xr)])
            fe = fun(xe)
            if fe < fr:
                verts[-1], fs[-1] = xe, fe
            else:
                verts[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            verts[-1], fs[-1] = xr, fr
        else:
            inside = fr >= fs[-1]
            base = worst if inside else xr
            fb = fs[-1] if inside else fr
            xc = clip([c + rho * (b - c) for c, b in zip(centroid, base)])
            fc = fun(xc)
            if fc < fb:
                verts[-1], fs[-1] = xc, fc
            else:
                for j in range(1, n + 1):
                    verts[j] = clip(
                        [b + sigma * (v - b) for v, b in zip(verts[j], verts[0])]
                    )
                    fs[j] = fun(verts[j])
    order = sorted(range(n + 1), key=lambda i: (fs[i], verts[i]))
    return verts[order[0]], fs[order[0]], converged


class _Candidate(NamedTuple):
    rmse: float
    u: float
    m: float
    omega: float | None
    beta: np.ndarray
    converged: bool


class _Objective:
    """RMSE of the linear subproblem as a function of (u, m[, omega]).

    ``u = t_c - t_anchor`` is the critical-time offset; ``s`` holds the
    anchored times t_anchor - t, so dt = u + s never touches absolute time.
    Degenerate nodes evaluate to +inf.  Counts every solve.
    """

    def __init__(self, s: np.ndarray, y: np.ndarray, lppl: bool):
        self.s = s
        self.y = y
        self.lppl = lppl
        self.evals = 0

    def rmse(self, u: float, m: float, omega: float | None) -> float:
        self.evals += 1
        try:
            _, value = _subproblem(u + self.s, self.y, m, omega if self.lppl else None)
        except DegenerateWindowError:
            return math.inf
        return value

    def solve(self, u: float, m: float, omega: float | None):
        self.evals += 1
        return _subproblem(u + self.s, self.y, m, omega if self.lppl else None)


def _grid_scan(obj: _Objective, config: FitConfig):
    """Evaluate the coarse grid, returning node records sorted lexicographically.

    Sort key is (rmse, u, m, omega); degenerate nodes land at the end with
    +inf.  Transcendentals are shared across the (m, omega) plane per node.
    """
    u_nodes = config.tc_offsets()
    m_nodes = config.m_nodes()
    w_nodes = config.omega_nodes() if obj.lppl else np.array([0.0])
    records = []
    ones = np.ones_like(obj.s)
    for u in u_nodes:
        dt = u + obj.s
        ln = np.log(dt)
        F = np.exp(np.outer(ln, m_nodes))
        if obj.lppl:
            CO = np.cos(np.outer(ln, w_nodes))
            SI = np.sin(np.outer(ln, w_nodes))
        for im, m in enumerate(m_nodes):
            f = F[:, im]
            if obj.lppl:
                for iw, w in enumerate(w_nodes):
                    obj.evals += 1
                    try:
                        _, rmse = _lstsq_columns(
                            [ones, f, f * CO[:, iw], f * SI[:, iw]], obj.y
                        )
                    except DegenerateWindowError:
                        rmse = math.inf
                    records.append((rmse, u, m, w))
            else:
                obj.evals += 1
                try:
                    _, rmse = _lstsq_columns([ones, f], obj.y)
                except DegenerateWindowError:
                    rmse = math.inf
                records.append((rmse, u, m, 0.0))
    records.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    return records


def _refine_start(obj: _Objective, start, config: FitConfig) -> _Candidate:
    """Simplex refinement from one grid node.

    Initial simplex steps are half a grid spacing along each axis, so the
    search explores the basin the coarse grid resolved.
    """
    u_lo = max(config.tc_bounds[0], TC_OFFSET_FLOOR)
    u_hi = config.tc_bounds[1]
    axes = [(u_lo, u_hi), config.m_bounds]
    x0 = [start[0], start[1]]
    if obj.lppl:
        axes.append(config.omega_bounds)
        x0.append(start[2])
    steps = [
        (hi - lo) / (g - 1) / 2.0
        for (lo, hi), g in zip(axes, config.grid_sizes)
    ]

    def fun(x):
        return obj.rmse(*_unpack(x, obj.lppl))

    x, f, converged = _nelder_mead(
        fun, x0, steps, axes, config.refine_tol, config.refine_max_iter
    )
    u, m, omega = _unpack(x, obj.lppl)
    try:
        beta, rmse = obj.solve(u, m, omega)
    except DegenerateWindowError:
        return _Candidate(math.inf, u, m, omega, np.zeros(4 if obj.lppl else 2), False)
    return _Candidate(min(rmse, f), u, m, omega, beta, converged)


def _unpack(x, lppl: bool):
    return (x[0], x[1], x[2] if lppl else None)


def fit_window(
    series: PriceSeries,
    window: Window,
    model: str = "lppl",
    config: FitConfig = FitConfig(),
) -> FitResult:
    """Calibrate the LPPL (or pure power-law) curve on one window.

    Coarse grid over (t_c, m, omega), then a deterministic bounded simplex
    refinement from the ``refine_starts`` best nodes.  The LPPL search
    additionally refines from a pure power-law warm start, which guarantees
    its RMSE never exceeds the power-law fit's on the same window and config.
    Ties are broken by lower (rmse, t_c, m, omega).
    """
    if model not in MODELS:
        raise ValidationError(f"model must be one of {MODELS}, got {model!r}")
    i0, i1 = resolve_window(series, window)
    n = i1 - i0
    if n < 8:
        raise InsufficientDataError(f"window holds {n} points; need at least 8 to fit")
    t = series.times[i0:i1]
    p = series.prices[i0:i1]
    t_anchor = float(t[-1])
    # Anchor time at the window end and price at the last observation: the
    # objective then depends only on time differences and price ratios.
    s = t_anchor - t
    y = np.log(p / p[-1])
    lppl = model == "lppl"
    obj = _Objective(s, y, lppl)

    records = _grid_scan(obj, config)
    if not math.isfinite(records[0][0]):
        raise FitFailureError(
            "every grid node produced a rank-deficient linear subproblem"
        )
    starts = [r[1:] for r in records[: config.refine_starts] if math.isfinite(r[0])]

    candidates = [_refine_start(obj, st, config) for st in starts]
    if lppl:
        candidates.append(_warm_start_from_power_law(obj, config))

    winner = min(candidates, key=lambda c: (c.rmse, c.u, c.m, c.omega or 0.0))
    no_bubble = all(c.beta[1] >= 0.0 for c in candidates)

    A = float(winner.beta[0]) + math.log(float(p[-1]))
    B = float(winner.beta[1])
    if lppl:
        C, phi = recover_oscillation(B, float(winner.beta[2]), float(winner.beta[3]))
        params = LpplParams(
            A=A, B=B, C=C, m=winner.m, omega=winner.omega, phi=phi,
            tc=t_anchor + winner.u,
        )
    else:
        params = LpplParams(
            A=A, B=B, C=0.0, m=winner.m, omega=0.0, phi=0.0, tc=t_anchor + winner.u
        )
    fitted_window = Window(t_start=float(t[0]), t_last=t_anchor, i0=i0, i1=i1)
    return FitResult(
        params=params,
        rmse=winner.rmse,
        n_points=n,
        window=fitted_window,
        converged=winner.converged,
        objective_evals=obj.evals,
        model=model,
        no_bubble_signature=no_bubble,
    )


def _warm_start_from_power_law(obj: _Objective, config: FitConfig) -> _Candidate:
    """Refine the LPPL objective from the best pure power-law solution.

    Because the four-column subproblem contains the two-column one, the
    warm-start value already matches the power-law RMSE; refinement can only
    improve it.
    """
    pl_obj = _Objective(obj.s, obj.y, lppl=False)
    pl_records = _grid_scan(pl_obj, config)
    candidate = None
    if math.isfinite(pl_records[0][0]):
        pl_starts = [r[1:] for r in pl_records[: config.refine_starts] if math.isfinite(r[0])]
        pl_candidates = [_refine_start(pl_obj, st, config) for st in pl_starts]
        candidate = min(pl_candidates, key=lambda c: (c.rmse, c.u, c.m))
    obj.evals += pl_obj.evals
    if candidate is None:
        # Power-law grid entirely degenerate; fall back to the mid omega node.
        u_nodes, m_nodes = config.tc_offsets(), config.m_nodes()
        candidate = _Candidate(
            math.inf, float(u_nodes[0]), float(m_nodes[len(m_nodes) // 2]),
            None, np.zeros(2), False,
        )
    w_nodes = config.omega_nodes()
    scored = [(obj.rmse(candidate.u, candidate.m, w), w) for w in w_nodes]
    _, w_best = min(scored, key=lambda t: (t[0], t[1]))
    return _refine_start(obj, (candidate.u, candidate.m, w_best), config)


def fit_exponential(series: PriceSeries, window: Window | None = None) -> ExponentialFit:
    """Constant-growth benchmark: OLS of log-price on time.

    ``growth_rate`` is in log-units per year; ``intercept`` is the fitted
    log-price extrapolated to time zero.
    """
    if window is None:
        i0, i1 = 0, len(series)
    else:
        i0, i1 = resolve_window(series, window)
    t = series.times[i0:i1]
    y = np.log(series.prices[i0:i1])
    if t.size < 2:
        raise InsufficientDataError("exponential fit needs at least 2 points")
    t_mean = float(t.mean())
    y_mean = float(y.mean())
    tt = t - t_mean
    denom = float(tt @ tt)
    if denom == 0.0:
        raise DegenerateWindowError("all observations share one timestamp")
    slope = float(tt @ (y - y_mean)) / denom
    r = y - (y_mean + slope * tt)
    rmse = math.sqrt(float(r @ r) / y.size)
    return ExponentialFit(slope, y_mean - slope * t_mean, rmse)
