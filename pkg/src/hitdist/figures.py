"""File-based figure rendering for the command-line report paths.

Everything here draws through the Agg backend and writes straight to
disk, so it works in headless environments and never opens a window.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .linsys import HitDistribution
from .mcsim import CompareReport

__all__ = [
    "save_distribution_figure",
    "save_comparison_figure",
    "save_multiplier_figure",
    "save_coeff_figure",
]

_DPI = 150


def _finish(fig, path: str | Path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def save_distribution_figure(dist: HitDistribution, path: str | Path):
    """Plot one hit distribution over its target window."""
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.plot(dist.targets, dist.probs, lw=1.2, color="tab:blue")
    ax.axvline(dist.start[0], color="0.6", lw=0.8, ls="--")
    ax.set_xlabel("landing column")
    ax.set_ylabel("probability")
    ax.set_title(
        f"first-hit distribution from ({dist.start[0]}, {dist.start[1]}); "
        f"window mass {dist.mass:.6f}, tail estimate {dist.tail_estimate:.2e}"
    )
    ax.grid(alpha=0.3)
    _finish(fig, path)


def save_comparison_figure(report: CompareReport, path: str | Path):
    """Overlay model and Monte Carlo estimates, with a residual panel."""
    fig, (ax, res) = plt.subplots(
        2, 1, figsize=(8.0, 6.0), sharex=True, height_ratios=[3, 1]
    )
    ax.plot(report.targets, report.model, lw=1.2, color="tab:blue", label="model")
    ax.errorbar(
        report.targets,
        report.empirical,
        yerr=report.stderr,
        fmt=".",
        ms=3,
        color="tab:orange",
        ecolor="tab:orange",
        alpha=0.7,
        label=f"simulation ({report.walks:,} walks)",
    )
    if np.all(report.model > 0) and np.all(report.empirical > 0):
        ax.set_yscale("log")
    ax.set_ylabel("probability")
    ax.set_title(
        f"start ({report.start[0]}, {report.start[1]}); "
        f"TV distance {report.tv_distance:.4f}, "
        f"truncated {report.truncated_fraction:.2%}"
    )
    ax.legend()
    ax.grid(alpha=0.3)
    res.axhline(0.0, color="0.5", lw=0.8)
    res.plot(report.targets, report.model - report.empirical, lw=0.9, color="tab:red")
    res.set_xlabel("landing column")
    res.set_ylabel("model - sim")
    res.grid(alpha=0.3)
    _finish(fig, path)


def save_multiplier_figure(thetas: np.ndarray, values: np.ndarray, path: str | Path):
    """Plot the descent multiplier over its angular domain."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(thetas, values, lw=1.4, color="tab:green")
    ax.set_xlabel("angle")
    ax.set_ylabel("descent multiplier")
    ax.set_xlim(0.0, np.pi)
    ax.grid(alpha=0.3)
    _finish(fig, path)


def save_coeff_figure(level: int, offsets: np.ndarray, values: np.ndarray, path: str | Path):
    """Plot one row of hit coefficients on a log scale."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    positive = values > 0
    ax.semilogy(offsets[positive], values[positive], ".-", ms=4, color="tab:purple")
    ax.set_xlabel("offset")
    ax.set_ylabel("coefficient")
    ax.set_title(f"flat-floor hit coefficients, level {level}")
    ax.grid(alpha=0.3, which="both")
    _finish(fig, path)
