#!/usr/bin/env python3
"""Why super-exponential growth has a finite-time singularity.

The positive-feedback equation dp/dt = c p^2 (demand grows with price, which
feeds demand) has the closed form p(t) = p0 / (1 - c p0 t): the price reaches
infinity at the finite time t* = 1/(c p0), unlike exponential growth which
merely keeps compounding.  Along the trajectory the quantity 1/p + c t is
exactly conserved, which pins the solution and makes the blow-up time visible
as the x-intercept of a straight line: 1/p(t) = 1/p0 - c t.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from bubblefit import synth_feedback_ode

OUTDIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")


def main() -> None:
    p0, c = 1.0, 0.5
    t_star = 1.0 / (c * p0)
    series = synth_feedback_ode(p0=p0, c=c, dt=t_star / 400, n=395)

    conserved = 1.0 / series.prices + c * series.times
    drift = np.max(np.abs(conserved - 1.0 / p0))
    print(f"singularity at t* = 1/(c p0) = {t_star}")
    print(f"price at the last sampled step (98.5% of t*): {series.prices[-1]:.1f}")
    print(f"conservation of 1/p + c t: max |drift| = {drift:.2e} (exactly 1/p0 = {1 / p0})")

    exp_match = p0 * np.exp((c * p0) * series.times)  # same initial growth rate

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
    ax1.semilogy(series.times, series.prices, lw=1.2, label="feedback: $\\dot p = c\\,p^2$")
    ax1.semilogy(series.times, exp_match, "k--", lw=1, label="exponential, same initial rate")
    ax1.axvline(t_star, color="red", ls=":", lw=1, label="singularity $t^*$")
    ax1.set_xlabel("time")
    ax1.set_ylabel("price (log scale)")
    ax1.set_title("Super-exponential vs exponential growth")
    ax1.legend(fontsize=8)
    ax2.plot(series.times, 1.0 / series.prices, lw=1.2)
    ax2.axhline(0, color="k", lw=0.5)
    ax2.axvline(t_star, color="red", ls=":", lw=1)
    ax2.set_xlabel("time")
    ax2.set_ylabel("$1/p(t)$")
    ax2.set_title("Inverse price falls on a straight line to zero at $t^*$")
    os.makedirs(OUTDIR, exist_ok=True)
    path = os.path.join(OUTDIR, "07_feedback_singularity.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
