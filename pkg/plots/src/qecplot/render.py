"""Overlay and multi-panel figure rendering."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import read_series

STYLES = ("auto", "points-with-errors", "line")


@dataclass(frozen=True)
class SeriesSpec:
    path: str
    label: str
    style: str = "auto"  # predictions default to lines, simulations to points

    def __post_init__(self):
        if self.style not in STYLES:
            raise ValueError(f"unknown style {self.style!r}")


@dataclass
class PlotSpec:
    series: list
    out: str
    logy: bool = False
    title: Optional[str] = None

    def __post_init__(self):
        if not self.series:
            raise ValueError("a plot needs at least one input series")


def _draw_series(ax, spec: SeriesSpec, logy: bool) -> int:
    """Plot one series; returns the number of points dropped for log scale."""
    curve = read_series(spec.path)
    style = spec.style
    if style == "auto":
        style = "line" if curve.is_prediction else "points-with-errors"
    cycles, mean, err = curve.cycles, curve.mean, curve.stderr
    dropped = 0
    if logy:
        keep = mean > 0
        dropped = int(np.sum(~keep))
        cycles, mean, err = cycles[keep], mean[keep], err[keep]
    if style == "line":
        ax.plot(cycles, mean, "-", label=spec.label)
    else:
        ax.errorbar(cycles, mean, yerr=err, fmt="o", markersize=3, capsize=2,
                    linestyle="none", label=spec.label)
    return dropped


def render_overlay(spec: PlotSpec) -> int:
    """Write one failure-vs-cycles figure; returns dropped-point count."""
    fig, ax = plt.subplots(figsize=(7, 5))
    dropped = 0
    for series in spec.series:
        dropped += _draw_series(ax, series, spec.logy)
    ax.set_xlabel("QEC cycle")
    ax.set_ylabel("logical failure probability")
    if spec.logy:
        ax.set_yscale("log")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)
    if dropped:
        print(f"warning: dropped {dropped} nonpositive point(s) for log scale")
    if not os.path.getsize(spec.out):
        raise RuntimeError(f"wrote empty image {spec.out}")
    return dropped


def render_scaling_panel(specs: list, out: str, logy: bool = False,
                         title: Optional[str] = None) -> None:
    """Side-by-side panels (e.g. active vs passive) with shared axes."""
    if not specs:
        raise ValueError("need at least one panel")
    fig, axes = plt.subplots(
        1, len(specs), figsize=(6 * len(specs), 5), sharex=True, sharey=True
    )
    if len(specs) == 1:
        axes = [axes]
    dropped = 0
    for ax, panel in zip(axes, specs):
        for series in panel.series:
            dropped += _draw_series(ax, series, logy)
        if panel.title:
            ax.set_title(panel.title)
        ax.set_xlabel("QEC cycle")
        ax.legend()
    axes[0].set_ylabel("logical failure probability")
    if logy:
        axes[0].set_yscale("log")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    if dropped:
        print(f"warning: dropped {dropped} nonpositive point(s) for log scale")
    if not os.path.getsize(out):
        raise RuntimeError(f"wrote empty image {out}")
