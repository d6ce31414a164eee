"""Report outputs: histogram CSVs, rendered figures, sample streams.

Delimited data is the primary artifact; each histogram CSV gets a rendered
PNG next to it for quick inspection.  All CSV output is deterministic for a
fixed input; figures depend only on the same data.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

DEFAULT_BINS = 100


def histogram_bins(
    values: Sequence[float], nbins: int = DEFAULT_BINS
) -> tuple[list[float], list[int]]:
    """Equal-width bins over the sampled range.

    Returns (edges, counts) with len(edges) == len(counts) + 1.  The top
    edge is inclusive.  A constant sample gets one unit-width bin around it.
    """
    import numpy as np

    if len(values) == 0:
        raise ValueError("histogram needs at least one value")
    arr = np.asarray(values, dtype=float)
    lo = float(arr.min())
    hi = float(arr.max())
    if lo == hi:
        return [lo - 0.5, hi + 0.5], [len(values)]
    counts, edges = np.histogram(arr, bins=nbins, range=(lo, hi))
    return [float(e) for e in edges], [int(c) for c in counts]


def write_histogram_csv(path: Path, edges: list[float], counts: list[int]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_lower", "bin_upper", "count"])
        for k, c in enumerate(counts):
            writer.writerow([repr(edges[k]), repr(edges[k + 1]), c])


def render_histogram_png(
    path: Path,
    edges: list[float],
    counts: list[int],
    observed: float | None = None,
    title: str = "",
    xlabel: str = "",
) -> None:
    """Render the binned histogram to a PNG, marking the observed value."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    widths = [edges[k + 1] - edges[k] for k in range(len(counts))]
    ax.bar(edges[:-1], counts, width=widths, align="edge",
           color="#4878a8", edgecolor="none")
    if observed is not None:
        ax.axvline(observed, color="#c44e52", linewidth=1.5,
                   label=f"observed = {observed:g}")
        ax.legend(frameon=False)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("samples")
    if title:
        ax.set_title(title)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_samples_csv(
    path: Path,
    names: list[str],
    columns: dict[str, Sequence[float]],
    thinning: int,
    burn_in: int,
    per_chain: int | None = None,
) -> None:
    """Sample statistics stream: one row per retained sample.

    With pooled chains, per_chain is the retained count of each chain and
    the chain column identifies the source; steps restart per chain.
    """
    rows = len(columns[names[0]]) if names else 0
    if per_chain is None:
        per_chain = rows
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["chain", "step"] + names)
        for r in range(rows):
            chain, offset = divmod(r, per_chain) if per_chain else (0, r)
            step = burn_in + 1 + offset * thinning
            writer.writerow([chain, step] + [repr(columns[name][r]) for name in names])
