"""Figure rendering for experiment reports.

Draws the unique-winner fraction against the number of voters, one curve
per rule, and writes the figure next to the CSV output.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiments import FrequencyTable


def render_unique_fraction_figure(table: FrequencyTable, path: str, title: str | None = None) -> None:
    """Render per-rule curves of the fraction of elections with a unique winner."""
    rules = sorted({row.rule for row in table.rows})
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for rule in rules:
        rows = sorted((r for r in table.rows if r.rule == rule), key=lambda r: r.n)
        xs = [r.n for r in rows]
        ys = [r.unique / r.repetitions for r in rows]
        ax.plot(xs, ys, marker="o", markersize=3.5, linewidth=1.2, label=rule)
    ax.set_xlabel("number of voters")
    ax.set_ylabel("fraction with a unique winning committee")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8, ncol=2)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
