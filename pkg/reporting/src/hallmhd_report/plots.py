"""Static figures from diagnostics series: energy histories with decay
envelopes, and log-log scaling fits for parameter sweeps."""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bundle import SeriesBundle


@dataclass
class EnvelopeCheck:
    epsilon: float
    within: bool
    max_upper_excess: float
    max_lower_deficit: float


@dataclass
class SweepFit:
    slope: float
    expected_slope: float | None
    within_tolerance: bool | None


def _energy_axes(ax, bundle: SeriesBundle):
    t = bundle.times
    ax.semilogy(t, bundle.columns["l2_u"] + bundle.columns["l2_b"],
                label=f"{bundle.label}: L2 energy")
    ax.semilogy(t, bundle.columns["hs_u"] + bundle.columns["hs_b"],
                label=f"{bundle.label}: Sobolev energy", linestyle="--")
    ax.semilogy(t, bundle.columns["E_total"],
                label=f"{bundle.label}: total functional", linestyle=":")


def plot_energy(
    bundles: SeriesBundle | list[SeriesBundle],
    out_path,
    epsilon: float | None = None,
) -> EnvelopeCheck | None:
    """Log-scale energy history; with epsilon given (linear shell runs),
    overlay the exp(-2(1 -+ eps) t) envelopes and record in the caption
    whether the L2 curve stays between them."""
    if isinstance(bundles, SeriesBundle):
        bundles = [bundles]
    if not bundles or any(len(b) < 2 for b in bundles):
        raise ValueError("plot_energy needs at least two rows per series")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for bundle in bundles:
        _energy_axes(ax, bundle)

    check = None
    if epsilon is not None:
        b0 = bundles[0]
        t = b0.times
        e = b0.columns["l2_u"] + b0.columns["l2_b"]
        upper = e[0] * np.exp(-2.0 * (1.0 - epsilon) * t)
        lower = e[0] * np.exp(-2.0 * (1.0 + epsilon) * t)
        ax.semilogy(t, upper, color="gray", linewidth=0.8, label="slow envelope")
        ax.semilogy(t, lower, color="gray", linewidth=0.8, linestyle="--",
                    label="fast envelope")
        tol = 1e-9 * e[0]
        excess = float(np.max(e - upper))
        deficit = float(np.max(lower - e))
        check = EnvelopeCheck(
            epsilon=epsilon,
            within=bool(excess <= tol and deficit <= tol),
            max_upper_excess=excess,
            max_lower_deficit=deficit,
        )
        caption = (
            f"L2 energy within exp(-2(1-+{epsilon}) t) envelopes: {check.within}"
        )
        fig.text(0.5, 0.005, caption, ha="center", fontsize=8)

    ax.set_xlabel("time")
    ax.set_ylabel("energy")
    ax.legend(fontsize=8)
    fig.tight_layout(rect=(0, 0.03, 1, 1))
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return check


def plot_sweep(
    xs,
    ys,
    out_path,
    expected_slope: float | None = None,
    tolerance: float = 0.3,
    xlabel: str = "epsilon",
    ylabel: str = "value",
) -> SweepFit:
    """Log-log plot with a least-squares slope fit, reported in the figure."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3:
        raise ValueError("plot_sweep needs at least three points")
    if np.any(xs <= 0) or np.any(ys < 0):
        raise ValueError("sweep values must be positive for a log-log fit")
    if np.all(ys == ys[0]):
        slope = 0.0
    else:
        if np.any(ys <= 0):
            raise ValueError("sweep values must be positive for a log-log fit")
        slope = float(np.polyfit(np.log(xs), np.log(ys), 1)[0])

    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.loglog(xs, ys, "o-", label=ylabel)
    if np.any(ys > 0):
        ref = ys[0] * (xs / xs[0]) ** slope
        ax.loglog(xs, ref, "--", color="gray", label=f"fit slope {slope:+.3f}")
    within = None
    caption = f"fitted slope {slope:+.4f}"
    if expected_slope is not None:
        within = bool(abs(slope - expected_slope) <= tolerance)
        caption += f" (expected {expected_slope:+.2f} +- {tolerance}: {within})"
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    fig.text(0.5, 0.005, caption, ha="center", fontsize=8)
    fig.tight_layout(rect=(0, 0.04, 1, 1))
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return SweepFit(slope=slope, expected_slope=expected_slope, within_tolerance=within)
