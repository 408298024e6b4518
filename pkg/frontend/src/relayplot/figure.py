"""Semilog error-rate figure rendering."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .curves import CurveSet

MARKERS = ("o", "s", "v", "^", "D", "x", "*", "P")


def render(curves: CurveSet, out_path: str, title: str | None = None) -> str:
    """Draw every curve with its confidence bars and save the figure.

    Output format follows the file extension (.png, .svg, ...).  Returns
    the path written.
    """
    if not len(curves):
        raise ValueError("nothing to plot: no curves given")
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for i, curve in enumerate(curves):
        # keep error bars inside the positive half-plane for the log axis
        lower = np.minimum(curve.ci95, curve.cer * (1 - 1e-9))
        ax.errorbar(
            curve.snr_db,
            curve.cer,
            yerr=[lower, curve.ci95],
            marker=MARKERS[i % len(MARKERS)],
            capsize=3,
            label=curve.label,
        )
    ax.set_yscale("log")
    ax.set_xlabel("total power P (dB)")
    ax.set_ylabel("codeword error rate")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path
