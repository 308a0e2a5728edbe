#!/usr/bin/env python3
"""Anatomy of the log-periodic power-law curve.

Draws three curves approaching the same critical time: a pure power law
(C = 0), a mild oscillation (C = 0.1), and a strong one (C = 0.25).  The
oscillations share a fixed ratio between successive periods — the scaling
ratio lambda = exp(2*pi/omega) — so they accelerate as t -> t_c.  The script
prints the predicted oscillation "landmarks" t_c - d_k with d_{k+1} = d_k /
lambda and saves a figure.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from bubblefit import LpplParams, eval_lppl, eval_power_law, scaling_ratio

OUTDIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")


def main() -> None:
    tc = 2000.5
    base = dict(A=1.0, B=-0.6, m=0.4, omega=6.36, phi=0.0, tc=tc)
    curves = [
        ("pure power law (C = 0)", LpplParams(C=0.0, **base)),
        ("mild oscillation (C = 0.10)", LpplParams(C=0.10, **base)),
        ("strong oscillation (C = 0.25)", LpplParams(C=0.25, **base)),
    ]

    t = np.linspace(1997.0, tc - 1e-3, 2000)
    lam = scaling_ratio(curves[1][1])
    print(f"scaling ratio lambda = exp(2*pi/omega) = {lam:.6f}")
    print("oscillation landmarks t_c - d_k (d shrinks by 1/lambda each step):")
    d = tc - t[0]
    for k in range(8):
        print(f"  k={k}: t = {tc - d:.4f}  (distance to t_c = {d:.4f} y)")
        d /= lam

    fig, ax = plt.subplots(figsize=(8, 5))
    for label, params in curves:
        ax.plot(t, eval_lppl(params, t), label=label, lw=1.2)
    ax.plot(
        t,
        eval_power_law(curves[0][1], t),
        "k--",
        lw=0.8,
        label="power-law backbone",
    )
    ax.axvline(tc, color="red", ls=":", lw=1, label="critical time $t_c$")
    ax.set_xlabel("time (decimal years)")
    ax.set_ylabel("log price")
    ax.set_title("Log-periodic power law: accelerating oscillations into $t_c$")
    ax.legend(loc="upper left", fontsize=8)
    os.makedirs(OUTDIR, exist_ok=True)
    path = os.path.join(OUTDIR, "01_model_curves.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
