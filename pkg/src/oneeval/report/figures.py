"""Matplotlib figure rendering from the bundle's data series."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bundle import ReportBundle


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def _radar_figure(bundle: ReportBundle, path: Path) -> Path:
    categories = list(bundle.radar)
    values = [bundle.radar[c] for c in categories]
    fig, ax = plt.subplots(figsize=(6, 6), subplot_kw=dict(polar=True))
    if len(categories) >= 3:
        angles = np.linspace(0, 2 * np.pi, len(categories), endpoint=False).tolist()
        closed_values = values + values[:1]
        closed_angles = angles + angles[:1]
        ax.plot(closed_angles, closed_values, color="#3b6fb6", linewidth=2)
        ax.fill(closed_angles, closed_values, color="#3b6fb6", alpha=0.25)
        ax.set_thetagrids(np.degrees(angles), categories)
    else:
        # radar needs >= 3 axes; degrade to a bar chart on the same canvas
        ax.remove()
        ax = fig.add_subplot(111)
        ax.bar(categories, values, color="#3b6fb6")
    ax.set_ylim(0, 1)
    ax.set_title("Capability profile")
    return _save(fig, path)


def _sunburst_figure(bundle: ReportBundle, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 7))
    cmap = plt.get_cmap("tab20")
    inner, middle, outer = [], [], []
    for ci, node in enumerate(bundle.sunburst):
        bench_count = sum(max(len(b["metrics"]), 1) for b in node["benchmarks"])
        inner.append((node["category"], bench_count, cmap(ci * 2 % 20)))
        for b in node["benchmarks"]:
            middle.append((b["benchmark"].split("/")[-1], max(len(b["metrics"]), 1), cmap((ci * 2 + 1) % 20)))
            for m in b["metrics"]:
                outer.append((f"{m['metric']}\n{m['score']:.2f}", 1, cmap((ci * 2 + 1) % 20)))
    if not inner:
        ax.text(0.5, 0.5, "no data", ha="center")
        return _save(fig, path)
    for ring, radius in ((inner, 0.4), (middle, 0.7), (outer, 1.0)):
        sizes = [size for _, size, _ in ring]
        colors = [color for _, _, color in ring]
        labels = [label for label, _, _ in ring]
        ax.pie(
            sizes,
            radius=radius,
            colors=colors,
            labels=labels if radius < 1.0 else None,
            labeldistance=0.75,
            textprops={"fontsize": 7},
            wedgeprops=dict(width=0.28, edgecolor="white"),
        )
    ax.set_title("Category > benchmark > metric")
    return _save(fig, path)


def _histogram_figure(bundle: ReportBundle, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    histogram = bundle.error_histogram
    if histogram:
        classes = sorted(histogram)
        ax.bar(classes, [histogram[c] for c in classes], color="#b65c3b")
        ax.set_ylabel("failed cases")
        ax.tick_params(axis="x", rotation=20)
    else:
        ax.text(0.5, 0.5, "no failures", ha="center", va="center")
        ax.set_axis_off()
    ax.set_title("Error classes")
    return _save(fig, path)


def _length_figure(bundle: ReportBundle, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    groups = [("correct", bundle.length_correct, "#3b8c4e"), ("incorrect", bundle.length_incorrect, "#b63b3b")]
    present = [(name, stats, color) for name, stats, color in groups if stats]
    if present:
        x = np.arange(3)
        width = 0.35
        for gi, (name, stats, color) in enumerate(present):
            ax.bar(x + gi * width, [stats.mean, stats.median, stats.p90], width, label=f"{name} (n={stats.count})", color=color)
        ax.set_xticks(x + width / 2 * (len(present) - 1))
        ax.set_xticklabels(["mean", "median", "p90"])
        ax.set_ylabel("output tokens")
        ax.legend()
    else:
        ax.text(0.5, 0.5, "no samples", ha="center", va="center")
        ax.set_axis_off()
    ax.set_title("Output length: correct vs incorrect")
    return _save(fig, path)


def render_figures(bundle: ReportBundle, out_dir: str | Path) -> list[Path]:
    """Render radar, sunburst, error histogram, and length charts as PNGs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return [
        _radar_figure(bundle, out / "radar.png"),
        _sunburst_figure(bundle, out / "sunburst.png"),
        _histogram_figure(bundle, out / "error_histogram.png"),
        _length_figure(bundle, out / "length_distribution.png"),
    ]
