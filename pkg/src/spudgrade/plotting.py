"""Report figures. Rendered to files only (Agg backend), never shown."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from spudgrade.core import format_percent  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
    "savefig.bbox": "tight",
}
DAMAGED_PCT = 25
SERIOUS_PCT = 50


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps PNG output byte-stable across runs
    fig.savefig(path, metadata={"Software": None} if path.suffix.lower() == ".png" else None)
    plt.close(fig)
    return path


def grade_panels(frame, roi, green, overlay, report, path) -> Path:
    """Input, ROI mask, green mask and overlay side by side."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 4, figsize=(12, 3.2))
        panels = [
            (frame.data, "input"),
            (roi.bits, f"ROI ({report.roi_pixels} px)"),
            (green.bits, f"green ({report.green_pixels} px)"),
            (overlay.data, f"overlay: {format_percent(report.percent_centi)}%"),
        ]
        for ax, (img, title) in zip(axes, panels):
            ax.imshow(img, cmap="gray" if img.ndim == 2 else None, interpolation="nearest")
            ax.set_title(title)
            ax.set_axis_off()
        fig.suptitle(f"grade: {report.grade.value}  ({report.backend} backend)")
        return _save(fig, path)


def batch_summary(rows, path) -> Path:
    """Green percentage per file with the two grade limits drawn in.

    ``rows`` is a sequence of ``(name, percent_centi)``.
    """
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(max(4, 0.5 * len(rows) + 2), 3.2))
        names = [r[0] for r in rows]
        values = np.array([r[1] / 100 for r in rows], dtype=float)
        colors = np.where(values > SERIOUS_PCT, "#b2182b", np.where(values > DAMAGED_PCT, "#ef8a62", "#67a9cf"))
        ax.bar(range(len(rows)), values, color=colors)
        for level in (DAMAGED_PCT, SERIOUS_PCT):
            ax.axhline(level, color="k", lw=0.8, ls="--")
        ax.set_xticks(range(len(rows)))
        ax.set_xticklabels(names, rotation=60, ha="right")
        ax.set_ylim(0, 100)
        ax.set_ylabel("green share of ROI (%)")
        return _save(fig, path)


def bench_bars(report, published_sw_per_pixel_ns: float, published_clock_ns: float, path) -> Path:
    """Per-pixel time of each software path against the hardware clock, log scale."""
    with plt.rc_context(STYLE):
        labels = [f"{k} (measured)" for k in report.sw_frame_ns]
        values = [v / report.pixels for v in report.sw_frame_ns.values()]
        labels += ["hw clock (model)", "sw (published)", "hw clock (published)"]
        values += [report.hw_clock_period_ns, published_sw_per_pixel_ns, published_clock_ns]
        fig, ax = plt.subplots(figsize=(6, 3.2))
        ax.barh(labels, values, color=["#4d4d4d"] * len(report.sw_frame_ns) + ["#2166ac", "#999999", "#92c5de"])
        ax.set_xscale("log")
        ax.set_xlabel("ns per pixel")
        ax.invert_yaxis()
        return _save(fig, path)
