"""Figure rendering for report outputs. Every function writes one image file
and returns the path; the Agg backend keeps this headless-safe."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .influence import InfluenceReport
from .jmperc import RasterColoring, SweepResult
from .spectrum import BlockSpectrum
from .threshold import ThresholdCurve

__all__ = [
    "plot_threshold_curve",
    "plot_sweep",
    "plot_spectrum",
    "plot_influence",
    "plot_raster",
]


def plot_threshold_curve(curve: ThresholdCurve, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    hs, gs = curve.hs, curve.gs
    ax.plot(hs, gs, marker="o", markersize=3, lw=1.2, color="#29527a")
    ax.set_xlabel("h")
    ax.set_ylabel("event probability")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(alpha=0.3)
    logits = [(s.h, s.logit) for s in curve.samples if s.logit is not None]
    if logits:
        twin = ax.twinx()
        twin.plot(*zip(*logits), lw=1.0, ls="--", color="#b5562c")
        twin.set_ylabel("logit", color="#b5562c")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def plot_sweep(result: SweepResult, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    ps = np.asarray(result.ps)
    ax.fill_between(
        ps, result.wilson_low, result.wilson_high, alpha=0.25, color="#29527a",
        label="95% band",
    )
    ax.plot(ps, result.freq, marker="o", markersize=3, color="#29527a",
            label=f"{result.direction} crossing")
    if result.dual_freq is not None:
        ax.plot(ps, result.dual_freq, marker="s", markersize=3, ls="--",
                color="#b5562c", label="dual crossing")
    ax.axvline(0.5, color="gray", lw=0.8, ls=":")
    ax.set_xlabel("black probability p")
    ax.set_ylabel("crossing frequency")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    ax.set_title(f"s={result.s:g}, lam={result.lam:g}, {result.trials} trials")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def plot_spectrum(spectrum: BlockSpectrum, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    levels = np.arange(len(spectrum.weights_by_level))
    ax.bar(levels, spectrum.weights_by_level, color="#29527a")
    ax.set_xlabel("total degree s")
    ax.set_ylabel("squared-coefficient mass")
    ax.set_xticks(levels)
    ax.grid(alpha=0.3, axis="y")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def plot_influence(report: InfluenceReport, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    coords = np.arange(1, len(report.per_coordinate) + 1)
    yerr = report.half_width if report.method == "monte_carlo" else None
    ax.bar(coords, report.per_coordinate, yerr=yerr, capsize=3, color="#29527a")
    ax.set_xlabel("coordinate")
    ax.set_ylabel("influence")
    ax.set_xticks(coords)
    ax.grid(alpha=0.3, axis="y")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def plot_raster(raster: RasterColoring, path: str) -> str:
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(
        raster.black, origin="lower", cmap="gray_r",
        extent=(0, raster.s, 0, raster.s), interpolation="nearest",
    )
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
