"""Price series container, CSV ingestion, and windowing utilities.

Time is measured in decimal calendar years: a date maps to
``year + (day_of_year - 1) / days_in_year``, so January 1st falls exactly on
the integer year boundary and 2000-07-02 maps to 2000.5 (leap year, day 184).
Durations given in days are converted with a fixed 365.25 day year.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    CsvParseError,
    InsufficientDataError,
    NoAdmissibleWindowsError,
    ValidationError,
)

DAYS_PER_YEAR = 365.25
DEFAULT_MIN_POINTS = 30
# Snap tolerance (years, ~30 ms) used when matching float grids against
# observation times; absorbs round-off without ever skipping a real day.
GRID_SNAP = 1e-9

CANONICAL_HEADER = ("date", "price")


def decimal_year(date: dt.date) -> float:
    """Map a calendar date to a decimal year.

    January 1st lands exactly on the integer year; later days advance by
    1/365 (or 1/366 in leap years) each.
    """
    year_start = dt.date(date.year, 1, 1)
    day_index = (date - year_start).days
    days_in_year = 366 if _is_leap(date.year) else 365
    return date.year + day_index / days_in_year


def date_from_decimal_year(t: float) -> dt.date:
    """Invert :func:`decimal_year`, rounding to the nearest calendar day."""
    year = int(np.floor(t))
    days_in_year = 366 if _is_leap(year) else 365
    day_index = int(round((t - year) * days_in_year))
    if day_index >= days_in_year:  # float landed a hair past New Year's Eve
        year += 1
        day_index = 0
    return dt.date(year, 1, 1) + dt.timedelta(days=day_index)


def _is_leap(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def daily_times(start: dt.date, n: int) -> np.ndarray:
    """Decimal-year timestamps for ``n`` consecutive calendar days.

    Use this instead of uniform ``1/365.25`` steps when the series will be
    written to CSV: uniform steps drift against the 365/366-day calendar and
    eventually two timestamps round to the same date.
    """
    if n < 1:
        raise ValidationError(f"need at least one day, got n={n}")
    return np.array(
        [decimal_year(start + dt.timedelta(days=i)) for i in range(n)]
    )


@dataclass(frozen=True)
class CsvConfig:
    """How to read a price CSV: column layout mirrors the canonical format."""

    date_format: str = "%Y-%m-%d"
    delimiter: str = ","
    has_header: bool = True


@dataclass(frozen=True)
class PriceSeries:
    """Strictly time-ordered positive prices at decimal-year times.

    Arrays are stored read-only; build modified copies rather than mutating.
    """

    times: np.ndarray
    prices: np.ndarray
    label: str = ""

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        prices = np.asarray(self.prices, dtype=float)
        if times.ndim != 1 or prices.ndim != 1:
            raise ValidationError("times and prices must be one-dimensional")
        if times.shape != prices.shape:
            raise ValidationError(
                f"times and prices differ in length: {times.size} vs {prices.size}"
            )
        if times.size < 2:
            raise InsufficientDataError("a price series needs at least two observations")
        if not (np.isfinite(times).all() and np.isfinite(prices).all()):
            raise ValidationError("times and prices must be finite")
        if np.any(np.diff(times) <= 0):
            bad = int(np.argmax(np.diff(times) <= 0)) + 1
            raise ValidationError(
                f"times must be strictly increasing (violated at index {bad})"
            )
        if np.any(prices <= 0):
            bad = int(np.argmax(prices <= 0))
            raise ValidationError(
                f"prices must be positive (violated at index {bad}: {prices[bad]})"
            )
        times = times.copy()
        prices = prices.copy()
        times.setflags(write=False)
        prices.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "prices", prices)

    def __len__(self) -> int:
        return self.times.size

    @property
    def t_first(self) -> float:
        return float(self.times[0])

    @property
    def t_last(self) -> float:
        return float(self.times[-1])

    @property
    def span_years(self) -> float:
        return self.t_last - self.t_first


@dataclass(frozen=True)
class Window:
    """A closed time interval [t_start, t_last], optionally bound to a series.

    ``i0``/``i1`` are the half-open index range into the parent series when the
    window was derived from one (see :func:`make_windows`); standalone windows
    (for synthesis) leave them unset.
    """

    t_start: float
    t_last: float
    i0: int | None = None
    i1: int | None = None

    def __post_init__(self):
        if not (np.isfinite(self.t_start) and np.isfinite(self.t_last)):
            raise ValidationError("window bounds must be finite")
        if self.t_start >= self.t_last:
            raise ValidationError(
                f"window start {self.t_start} must precede end {self.t_last}"
            )
        if (self.i0 is None) != (self.i1 is None):
            raise ValidationError("either both or neither of i0/i1 must be set")
        if self.i0 is not None and not 0 <= self.i0 < self.i1:
            raise ValidationError(f"bad index range [{self.i0}, {self.i1})")

    @property
    def n_points(self) -> int | None:
        return None if self.i0 is None else self.i1 - self.i0

    @property
    def span_years(self) -> float:
        return self.t_last - self.t_start


def resolve_window(series: PriceSeries, window: Window) -> tuple[int, int]:
    """Index range of observations of ``series`` inside ``window`` (closed)."""
    if window.i0 is not None:
        if window.i1 > len(series):
            raise ValidationError("window index range exceeds the series")
        return window.i0, window.i1
    i0 = int(np.searchsorted(series.times, window.t_start - GRID_SNAP, side="left"))
    i1 = int(np.searchsorted(series.times, window.t_last + GRID_SNAP, side="right"))
    if i1 - i0 < 2:
        raise InsufficientDataError(
            f"window [{window.t_start}, {window.t_last}] holds fewer than 2 observations"
        )
    return i0, i1


def load_csv(path, config: CsvConfig = CsvConfig(), label: str | None = None) -> PriceSeries:
    """Read a date,price CSV into a :class:`PriceSeries`.

    Rows are sorted by time; comment lines starting with ``#`` are ignored.
    Malformed rows, non-positive prices, and duplicate timestamps raise with
    the offending 1-based line number.
    """
    if hasattr(path, "read"):
        text = path.read()
        name = label if label is not None else "series"
    else:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
        name = label if label is not None else os.path.splitext(os.path.basename(path))[0]

    times: list[float] = []
    prices: list[float] = []
    lines: list[int] = []
    reader = csv.reader(io.StringIO(text), delimiter=config.delimiter)
    header_seen = False
    for line_no, row in enumerate(reader, start=1):
        if not row or (row[0].lstrip().startswith("#")):
            continue
        if config.has_header and not header_seen:
            header_seen = True
            continue
        if len(row) < 2:
            raise CsvParseError(
                f"line {line_no}: expected 2 columns, got {len(row)}", line_no
            )
        raw_date, raw_price = row[0].strip(), row[1].strip()
        try:
            date = dt.datetime.strptime(raw_date, config.date_format).date()
        except ValueError as exc:
            raise CsvParseError(f"line {line_no}: bad date {raw_date!r}: {exc}", line_no)
        try:
            price = float(raw_price)
        except ValueError:
            raise CsvParseError(f"line {line_no}: bad price {raw_price!r}", line_no)
        if not np.isfinite(price) or price <= 0:
            raise CsvParseError(
                f"line {line_no}: price must be positive and finite, got {raw_price}",
                line_no,
            )
        times.append(decimal_year(date))
        prices.append(price)
        lines.append(line_no)

    if len(times) < 2:
        raise InsufficientDataError(f"{name}: needs at least 2 data rows")

    order = np.argsort(times, kind="stable")
    t = np.asarray(times)[order]
    p = np.asarray(prices)[order]
    dup = np.nonzero(np.diff(t) == 0)[0]
    if dup.size:
        line_no = lines[int(order[dup[0] + 1])]
        raise CsvParseError(f"line {line_no}: duplicate timestamp", line_no)
    return PriceSeries(times=t, prices=p, label=name)


def emit(series: PriceSeries, path) -> None:
    """Write the canonical CSV form: ``date,price`` header, ISO dates, LF endings.

    Times are rounded to the nearest calendar day, so loading the emitted file
    reproduces any day-grid series bit-for-bit on times.
    """
    rows = [
        f"{date_from_decimal_year(t).isoformat()},{np.format_float_positional(p, trim='0')}"
        for t, p in zip(series.times, series.prices)
    ]
    text = "date,price\n" + "\n".join(rows) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def log_prices(series: PriceSeries) -> np.ndarray:
    """Natural log of the price path (positivity is a series invariant)."""
    return np.log(series.prices)


def locf_indices(times: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Last-observation-carried-forward: index of the latest time <= grid point.

    Grid points earlier than the first observation are a caller bug; the snap
    tolerance forgives sub-nanosecond float drift only.
    """
    idx = np.searchsorted(times, grid + GRID_SNAP, side="right") - 1
    if np.any(idx < 0):
        raise ValidationError("grid extends before the first observation")
    return idx


def increments(series: PriceSeries, step_days: float, on_log: bool = True) -> np.ndarray:
    """Non-overlapping differences sampled on a fixed step grid.

    The grid starts at the first observation and advances by ``step_days``;
    each grid point takes the last observation at or before it (LOCF).
    Returns the consecutive differences of the sampled (log-)values.
    """
    if step_days <= 0:
        raise ValidationError(f"step_days must be positive, got {step_days}")
    step_years = step_days / DAYS_PER_YEAR
    n_steps = int(np.floor((series.t_last - series.t_first) / step_years + GRID_SNAP))
    if n_steps < 1:
        raise InsufficientDataError(
            f"step of {step_days} days exceeds the series span"
        )
    grid = series.t_first + step_years * np.arange(n_steps + 1)
    values = np.log(series.prices) if on_log else series.prices
    sampled = values[locf_indices(series.times, grid)]
    return np.diff(sampled)


def make_windows(
    series: PriceSeries,
    t_last: float,
    start_grid,
    min_points: int = DEFAULT_MIN_POINTS,
) -> tuple[list[Window], list[float]]:
    """Shrinking windows sharing ``t_last``, one per admissible grid start.

    Returns ``(windows, dropped_starts)``: starts whose window would hold fewer
    than ``min_points`` observations are dropped and reported in the second
    element.  Raises when no start is admissible.
    """
    starts = np.atleast_1d(np.asarray(start_grid, dtype=float))
    if starts.size == 0:
        raise ValidationError("start_grid is empty")
    if t_last > series.t_last + GRID_SNAP:
        raise ValidationError(
            f"t_last {t_last} lies beyond the last observation {series.t_last}"
        )
    i_end = int(np.searchsorted(series.times, t_last + GRID_SNAP, side="right"))
    windows: list[Window] = []
    dropped: list[float] = []
    for start in starts:
        if start >= t_last:
            dropped.append(float(start))
            continue
        i0 = int(np.searchsorted(series.times, start - GRID_SNAP, side="left"))
        if i_end - i0 >= min_points:
            windows.append(
                Window(
                    t_start=float(series.times[i0]),
                    t_last=float(series.times[i_end - 1]),
                    i0=i0,
                    i1=i_end,
                )
            )
        else:
            dropped.append(float(start))
    if not windows:
        raise NoAdmissibleWindowsError(
            f"no admissible windows: all {starts.size} starts hold fewer than "
            f"{min_points} points before t_last={t_last}"
        )
    return windows, dropped
