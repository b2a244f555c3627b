"""Figures for benchmark CSVs and metric comparisons."""

from __future__ import annotations

import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .metrics import ComparisonRow  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}
MARKERS = {"rv": "o", "re": "s", "rvn": "^", "rw": "D"}


def read_bench_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def plot_bench(rows: list[dict], path) -> None:
    """Runtime and speedup over parallelism, one line per (algorithm, m)."""
    series = defaultdict(dict)
    for row in rows:
        key = (row["algorithm"], int(row["m"]))
        series[key][int(row["parallelism"])] = float(row["seconds"])
    with plt.rc_context(STYLE):
        fig, (ax_time, ax_speed) = plt.subplots(1, 2, figsize=(7.0, 2.8))
        top = 1
        for (algorithm, m), points in sorted(series.items()):
            ps = sorted(points)
            secs = [points[p] for p in ps]
            label = f"{algorithm.upper()} (|E|={m:,})"
            marker = MARKERS.get(algorithm, "x")
            ax_time.plot(ps, secs, marker=marker, label=label)
            base = points.get(1, points[ps[0]] * ps[0])
            ax_speed.plot(ps, [base / s for s in secs], marker=marker, label=label)
            top = max(top, ps[-1])
        ax_speed.plot([1, top], [1, top], color="0.6", linestyle="--", linewidth=0.8, label="linear")
        ax_time.set_xlabel("parallelism")
        ax_time.set_ylabel("runtime [s]")
        ax_speed.set_xlabel("parallelism")
        ax_speed.set_ylabel("speedup")
        ax_speed.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)


def plot_comparison(rows: list[ComparisonRow], path, title: str = "") -> None:
    """Horizontal bars of the sample/original ratio per metric."""
    names = [r.metric for r in rows]
    ratios = [r.ratio if r.ratio is not None else 0.0 for r in rows]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        bars = ax.barh(names, ratios, color="0.35")
        for bar, row in zip(bars, rows):
            if row.ratio is None:
                bar.set_hatch("//")
                bar.set_facecolor("white")
                bar.set_edgecolor("0.5")
        ax.axvline(1.0, color="tab:red", linewidth=0.8)
        ax.invert_yaxis()
        ax.set_xlabel("sample / original")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
