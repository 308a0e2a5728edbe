"""Command line front end.

Subcommands: fit, scan, crashes, lagcorr, pca, synth.  Exit codes: 0 on
success, 1 for usage errors (bad flags, unreadable input), 2 when the
analysis itself fails (degenerate window, insufficient ensemble, ...).

Every output file starts with a provenance comment line carrying the
subcommand, package version, and a hash of the invocation, so reruns with the
same flags produce byte-identical files.  Files are written atomically
(temporary file then rename) into ``--outdir`` (default: the
``BUBBLEFIT_OUTDIR`` environment variable, else the working directory).
"""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .calibrate import FitConfig, fit_exponential, fit_window
from .crash import DEFAULT_HORIZON_DAYS, DEFAULT_THRESHOLD, detect_crashes
from .errors import BubbleFitError, CsvParseError, InsufficientDataError, ValidationError
from .lagcorr import DEFAULT_MAX_LAG_DAYS, DEFAULT_STEPS_DAYS, cross_correlation_lag
from .model import LpplParams, NoiseSpec, eval_lppl, synth_lppl
from .pca import build_panel, first_principal_component
from .scan import scan_shrinking_windows
from .timeseries import (
    DEFAULT_MIN_POINTS,
    PriceSeries,
    Window,
    date_from_decimal_year,
    decimal_year,
    emit,
    load_csv,
    resolve_window,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems via exit code 1."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _parse_time(text: str) -> float:
    """Accept an ISO date (1997-08-07) or a decimal year literal (1997.6)."""
    try:
        return decimal_year(dt.datetime.strptime(text, "%Y-%m-%d").date())
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise _UsageError(f"cannot parse time {text!r}: use YYYY-MM-DD or a decimal year")


def _parse_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise _UsageError(f"expected LO,HI got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise _UsageError(f"expected numeric LO,HI got {text!r}")


def _parse_grid(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise _UsageError(f"expected three comma-separated sizes, got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise _UsageError(f"expected integer grid sizes, got {text!r}")


def _fit_config(args) -> FitConfig:
    return FitConfig(
        m_bounds=_parse_pair(args.m_bounds),
        omega_bounds=_parse_pair(args.omega_bounds),
        tc_bounds=_parse_pair(args.tc_bounds),
        grid_sizes=_parse_grid(args.grid),
        refine_tol=args.refine_tol,
        refine_max_iter=args.refine_max_iter,
    )


def _config_hash(args) -> str:
    payload = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    digest = hashlib.sha256(
        json.dumps(payload, sort_keys=True, default=str).encode()
    ).hexdigest()
    return digest[:12]


def _provenance(args) -> str:
    return f"# bubblefit {args.command} v{__version__} config={_config_hash(args)}"


def _outdir(args) -> str:
    out = args.outdir or os.environ.get("BUBBLEFIT_OUTDIR") or "."
    os.makedirs(out, exist_ok=True)
    return out


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".bubblefit-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: str, provenance: str, header: str, rows) -> None:
    lines = [provenance, header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_json(path: str, provenance: str, record: dict) -> None:
    record = {"provenance": provenance.lstrip("# "), **record}
    _atomic_write(path, json.dumps(record, indent=2, default=float) + "\n")


def _load(path, args):
    """Read an input CSV, mapping every load-phase failure to a usage error."""
    if not os.path.exists(path):
        raise _UsageError(f"input file not found: {path}")
    try:
        return load_csv(path)
    except (CsvParseError, ValidationError, InsufficientDataError, OSError) as exc:
        raise _UsageError(f"cannot load {path}: {exc}")


def _window_from_args(series: PriceSeries, args) -> Window:
    t_start = _parse_time(args.start) if args.start else series.t_first
    t_last = _parse_time(args.last) if args.last else series.t_last
    return Window(t_start=t_start, t_last=t_last)


def cmd_fit(args) -> int:
    series = _load(args.input, args)
    window = _window_from_args(series, args)
    out = _outdir(args)
    prov = _provenance(args)
    if args.model == "exp":
        i0, i1 = resolve_window(series, window)
        t = series.times[i0:i1]
        fit = fit_exponential(series, window)
        record = {
            "model": "exp",
            "growth_rate": fit.growth_rate,
            "intercept": fit.intercept,
            "rmse": fit.rmse,
            "n_points": int(i1 - i0),
            "t_start": float(t[0]),
            "t_last": float(t[-1]),
        }
        model_curve = fit.intercept + fit.growth_rate * t
        print(
            f"exp fit: growth_rate={fit.growth_rate:.6g}/yr rmse={fit.rmse:.6g} "
            f"n={i1 - i0}"
        )
    else:
        result = fit_window(series, window, args.model, _fit_config(args))
        record = result.to_record()
        i0, i1 = result.window.i0, result.window.i1
        t = series.times[i0:i1]
        model_curve = eval_lppl(result.params, t)
        p = result.params
        print(
            f"{args.model} fit: tc={p.tc:.6g} ({date_from_decimal_year(p.tc).isoformat()}) "
            f"m={p.m:.4g} omega={p.omega:.4g} B={p.B:.4g} rmse={result.rmse:.6g} "
            f"converged={result.converged}"
        )
        if result.no_bubble_signature:
            print("note: no bubble signature on this window (B >= 0)")
    observed = np.log(series.prices[i0:i1])
    _write_json(os.path.join(out, "fit_result.json"), prov, record)
    _write_csv(
        os.path.join(out, "fit_plot.csv"),
        prov,
        "time,observed_log_price,model_log_price",
        zip(t, observed, model_curve),
    )
    _write_csv(
        os.path.join(out, "fit_residuals.csv"),
        prov,
        "time,residual",
        zip(t, observed - model_curve),
    )
    return 0


def cmd_scan(args) -> int:
    series = _load(args.input, args)
    t_last = _parse_time(args.t_last) if args.t_last else series.t_last
    if "," in args.starts:
        start_grid = [_parse_time(s) for s in args.starts.split(",")]
    else:
        try:
            count = int(args.starts)
        except ValueError:
            raise _UsageError(f"--starts must be a count or comma-separated dates, got {args.starts!r}")
        if count < 1:
            raise _UsageError("--starts count must be >= 1")
        start_grid = np.linspace(series.t_first, t_last, count, endpoint=False)
    report = scan_shrinking_windows(
        series, t_last, start_grid, args.model, _fit_config(args), args.min_points
    )
    out = _outdir(args)
    prov = _provenance(args)
    _write_json(os.path.join(out, "scan_report.json"), prov, report.to_record())
    _write_csv(
        os.path.join(out, "scan_histogram.csv"),
        prov,
        "tc_bin_center,count",
        report.histogram_table(),
    )
    lo, hi = report.ci80
    print(
        f"scan: {len(report.fits)} windows, {report.tc_samples.size} tc samples, "
        f"80% CI [{date_from_decimal_year(lo).isoformat()}, "
        f"{date_from_decimal_year(hi).isoformat()}] "
        f"([{lo:.4f}, {hi:.4f}])"
    )
    return 0


def cmd_crashes(args) -> int:
    series = _load(args.input, args)
    events = detect_crashes(series, args.threshold, args.horizon)
    out = _outdir(args)
    rows = []
    for event in events:
        record = event.to_record()
        rows.append(
            (record["peak_date"], record["trough_date"], event.drawdown, event.duration_days)
        )
    _write_csv(
        os.path.join(out, "crashes.csv"),
        _provenance(args),
        "peak_date,trough_date,drawdown,duration_days",
        rows,
    )
    print(f"crashes: {len(events)} events (threshold={args.threshold}, horizon={args.horizon}d)")
    return 0


def cmd_lagcorr(args) -> int:
    a = _load(args.input[0], args)
    b = _load(args.input[1], args)
    try:
        steps = tuple(int(s) for s in args.steps.split(","))
    except ValueError:
        raise _UsageError(f"--steps must be comma-separated integers, got {args.steps!r}")
    result = cross_correlation_lag(a, b, steps, args.max_lag, not args.raw)
    out = _outdir(args)
    prov = _provenance(args)
    _write_csv(
        os.path.join(out, "lagcorr.csv"),
        prov,
        "step_days,lag_days,coefficient",
        result.table(),
    )
    _write_json(os.path.join(out, "lagcorr_summary.json"), prov, result.to_record())
    for i, step in enumerate(result.steps_days):
        print(f"lagcorr step={step}d: extremal lag {int(result.extremal_lags[i])}d")
    return 0


def cmd_pca(args) -> int:
    series_list = [_load(p, args) for p in args.input]
    panel = build_panel(series_list)
    component = first_principal_component(panel)
    out = _outdir(args)
    prov = _provenance(args)
    _write_json(os.path.join(out, "pca_summary.json"), prov, component.to_record())
    _write_csv(
        os.path.join(out, "pca_weights.csv"),
        prov,
        "asset,weight",
        zip(panel.assets, component.weights),
    )
    series = component.component_series
    _write_csv(
        os.path.join(out, "pca_component.csv"),
        prov,
        "date,level",
        (
            (date_from_decimal_year(t).isoformat(), _fmt(p))
            for t, p in zip(series.times, series.prices)
        ),
    )
    print(
        f"pca: {panel.n_assets} assets, explained fraction "
        f"{component.explained_fraction:.4f}"
    )
    return 0


def cmd_synth(args) -> int:
    params = LpplParams(
        A=args.a, B=args.b, C=args.c, m=args.m, omega=args.omega, phi=args.phi,
        tc=_parse_time(args.tc),
    )
    window = Window(t_start=_parse_time(args.t_start), t_last=_parse_time(args.t_last))
    series = synth_lppl(params, window, args.n, NoiseSpec(args.sigma, args.seed))
    dates = [date_from_decimal_year(t) for t in series.times]
    if len(set(dates)) != len(dates):
        raise _UsageError(
            "--n exceeds the number of calendar days in the window; "
            "dates would collide when written"
        )
    out = _outdir(args)
    path = args.output or os.path.join(out, "synthetic.csv")
    buf = io.StringIO()
    emit(series, buf)
    _atomic_write(path, f"{_provenance(args)}\n{buf.getvalue()}")
    print(f"synth: wrote {args.n} points to {path}")
    return 0


def _add_io_flags(p: _Parser) -> None:
    p.add_argument("--outdir", default=None, help="output directory (default: $BUBBLEFIT_OUTDIR or .)")


def _add_config_flags(p: _Parser) -> None:
    p.add_argument("--m-bounds", default="0.01,0.99", help="exponent search bounds LO,HI")
    p.add_argument("--omega-bounds", default="2,25", help="angular log-frequency bounds LO,HI")
    p.add_argument("--tc-bounds", default="0.0,0.5", help="critical-time offsets past window end, years")
    p.add_argument("--grid", default="20,15,15", help="coarse grid sizes NT,NM,NW")
    p.add_argument("--refine-tol", type=float, default=1e-8, help="refinement RMSE tolerance (relative)")
    p.add_argument("--refine-max-iter", type=int, default=500, help="refinement iteration cap")


def build_parser() -> _Parser:
    parser = _Parser(prog="bubblefit", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"bubblefit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="calibrate one window")
    p.add_argument("--input", required=True, help="date,price CSV")
    p.add_argument("--model", default="lppl", choices=("lppl", "power_law", "exp"))
    p.add_argument("--start", default=None, help="window start (date or decimal year)")
    p.add_argument("--last", default=None, help="window end (date or decimal year)")
    _add_config_flags(p)
    _add_io_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("scan", help="shrinking-window critical-time scan")
    p.add_argument("--input", required=True)
    p.add_argument("--model", default="lppl", choices=("lppl", "power_law"))
    p.add_argument("--t-last", default=None, help="common window end (date or decimal year)")
    p.add_argument("--starts", default="10", help="start count or comma-separated starts")
    p.add_argument("--min-points", type=int, default=DEFAULT_MIN_POINTS)
    _add_config_flags(p)
    _add_io_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("crashes", help="drawdown-rule crash detection")
    p.add_argument("--input", required=True)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--horizon", type=float, default=DEFAULT_HORIZON_DAYS)
    _add_io_flags(p)
    p.set_defaults(func=cmd_crashes)

    p = sub.add_parser("lagcorr", help="lagged cross-correlation of two series")
    p.add_argument("--input", nargs=2, required=True, metavar=("FIRST", "SECOND"))
    p.add_argument("--steps", default=",".join(str(s) for s in DEFAULT_STEPS_DAYS))
    p.add_argument("--max-lag", type=int, default=DEFAULT_MAX_LAG_DAYS)
    p.add_argument("--raw", action="store_true", help="difference raw prices, not log prices")
    _add_io_flags(p)
    p.set_defaults(func=cmd_lagcorr)

    p = sub.add_parser("pca", help="first principal component of a return panel")
    p.add_argument("--input", nargs="+", required=True, help="two or more CSVs")
    _add_io_flags(p)
    p.set_defaults(func=cmd_pca)

    p = sub.add_parser("synth", help="generate a synthetic LPPL price CSV")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--tc", required=True, help="critical time (date or decimal year)")
    p.add_argument("--t-start", required=True)
    p.add_argument("--t-last", required=True)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None, help="output CSV path (default: OUTDIR/synthetic.csv)")
    _add_io_flags(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (OSError, UnicodeDecodeError) as exc:
        print(f"bubblefit {args.command}: {exc}", file=sys.stderr)
        return 1
    except BubbleFitError as exc:
        print(f"bubblefit {args.command}: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
