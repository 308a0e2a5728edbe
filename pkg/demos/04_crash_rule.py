#!/usr/bin/env python3
"""Operational crash detection: local peak, fast drop, deep drawdown.

Builds a daily random walk from log-increments, plants two engineered crashes
(about -25% in 12 days and -18% in 20 days, each preceded by a one-day spike
that makes the peak unambiguous), and runs the detector with its default
rule: an event is a local price maximum followed within three weeks by a
trough at least 15% below the peak.  A slow -20% drift spread over half a
year is deliberately NOT an event — depth without speed doesn't qualify.
"""

import datetime as dt
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from bubblefit import PriceSeries, daily_times, detect_crashes

OUTDIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")


def main() -> None:
    rng = np.random.default_rng(11)
    n = 900
    times = daily_times(dt.date(2000, 1, 3), n)
    steps = rng.normal(0.0003, 0.004, n)

    steps[200] = 0.06  # spike: unambiguous local peak
    steps[201:213] = np.log(0.75) / 12  # -25% over 12 days
    steps[500] = 0.05
    steps[501:521] = np.log(0.82) / 20  # -18% over 20 days
    steps[700:880] = np.log(0.80) / 180 + rng.normal(0, 0.002, 180)  # slow grind

    prices = 100.0 * np.exp(np.cumsum(steps))
    series = PriceSeries(times=times, prices=prices, label="walk-with-crashes")
    events = detect_crashes(series)  # default rule: 15% within 21 days

    print(f"events found: {len(events)} (expected 2; the slow grind must not count)")
    for ev in events:
        print(
            f"  peak {ev.peak_time:9.4f} ({ev.peak_price:8.2f})"
            f"  ->  trough {ev.trough_time:9.4f} ({ev.trough_price:8.2f})"
            f"   drawdown {ev.drawdown:6.1%} in {ev.duration_days:5.1f} days"
        )

    fig, ax = plt.subplots(figsize=(9, 4.5))
    ax.plot(times, prices, lw=0.7, label="price")
    for i, ev in enumerate(events):
        ax.plot(ev.peak_time, ev.peak_price, "rv", ms=8, label="peak" if i == 0 else None)
        ax.plot(ev.trough_time, ev.trough_price, "g^", ms=8, label="trough" if i == 0 else None)
        ax.axvspan(ev.peak_time, ev.trough_time, color="red", alpha=0.12)
    ax.set_xlabel("time (decimal years)")
    ax.set_ylabel("price")
    ax.set_title("Drawdown rule: fast deep drops flagged, slow drift ignored")
    ax.legend(fontsize=8)
    os.makedirs(OUTDIR, exist_ok=True)
    path = os.path.join(OUTDIR, "04_crash_rule.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
