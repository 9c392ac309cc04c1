"""Chart rendering for report paths.

Every report command can optionally write figures (PNG via the Agg
backend) together with CSV companions holding the same numbers, so the
plots are re-derivable from the delimited output alone.  Figure files
are a presentation channel only: no computation reads them back, and
nothing numerical is rounded on the way out except by matplotlib's own
rasterization.
"""

from __future__ import annotations

import csv
from typing import Dict, List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = [
    "save_hilbert_chart",
    "save_dimension_chart",
    "save_status_grid",
    "write_csv",
]


def write_csv(path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(header))
        for row in rows:
            writer.writerow(list(row))


def save_hilbert_chart(path, values: Sequence[int], title: str) -> None:
    """Bar chart of a Hilbert function by degree."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    degrees = list(range(len(values)))
    ax.bar(degrees, list(values), color="#4878a8", edgecolor="black", linewidth=0.5)
    for x, y in zip(degrees, values):
        if y:
            ax.text(x, y, str(y), ha="center", va="bottom", fontsize=8)
    ax.set_xlabel("degree")
    ax.set_ylabel("dimension")
    ax.set_title(title)
    ax.set_xticks(degrees)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_dimension_chart(
    path, series: Dict[str, Sequence[int]], title: str
) -> None:
    """Grouped bars comparing graded dimension sequences."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    names = list(series)
    length = max((len(v) for v in series.values()), default=0)
    width = 0.8 / max(len(names), 1)
    for k, name in enumerate(names):
        values = list(series[name]) + [0] * (length - len(series[name]))
        offsets = [i + (k - (len(names) - 1) / 2) * width for i in range(length)]
        ax.bar(offsets, values, width=width, label=name, edgecolor="black",
               linewidth=0.4)
    ax.set_xlabel("degree")
    ax.set_ylabel("dimension")
    ax.set_title(title)
    ax.set_xticks(range(length))
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_status_grid(path, names: List[str], passed: List[bool], title: str) -> None:
    """One horizontal bar per named check, green for pass, red for fail."""
    fig, ax = plt.subplots(figsize=(6, 0.4 * max(len(names), 1) + 1.2))
    ypos = list(range(len(names)))[::-1]
    colors = ["#3c8c50" if ok else "#b43c3c" for ok in passed]
    ax.barh(ypos, [1] * len(names), color=colors, edgecolor="black", linewidth=0.4)
    for y, name, ok in zip(ypos, names, passed):
        ax.text(0.02, y, f"{name}: {'pass' if ok else 'FAIL'}",
                va="center", fontsize=8, color="white")
    ax.set_xlim(0, 1)
    ax.set_xticks([])
    ax.set_yticks([])
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
