"""Figures written next to the CLI's text/JSON reports.

Uses the object-oriented matplotlib API with the Agg canvas, so nothing here
touches pyplot's global state.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .relalg import Relation

# tick labels become unreadable past this many states
MAX_TICKS = 24


def relation_matrix(rel: Relation) -> np.ndarray:
    n = len(rel.space)
    m = np.zeros((n, n), dtype=bool)
    for i, j in rel.pairs():
        m[i, j] = True
    return m


def _draw(ax, rel: Relation, title: str):
    ax.imshow(relation_matrix(rel), cmap="Greys", vmin=0, vmax=1, interpolation="nearest")
    ax.set_title(title)
    n = len(rel.space)
    if n <= MAX_TICKS:
        ax.set_xticks(range(n))
        ax.set_yticks(range(n))
        ax.set_xticklabels(rel.space.states, rotation=90)
        ax.set_yticklabels(rel.space.states)
    else:
        ax.set_xticks([])
        ax.set_yticks([])
    ax.set_xlabel("to")
    ax.set_ylabel("from")


def _new_figure(ncols: int, size: float = 3.2) -> Figure:
    fig = Figure(figsize=(size * ncols, size + 0.4))
    FigureCanvasAgg(fig)
    return fig


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    return path


def relation_panels(panels: list[tuple[str, Relation]], path) -> Path:
    """One heat-map per relation, side by side."""
    fig = _new_figure(len(panels))
    for k, (title, rel) in enumerate(panels, 1):
        _draw(fig.add_subplot(1, len(panels), k), rel, title)
    return _save(fig, path)


def model_figures(model, outdir) -> list[Path]:
    outdir = Path(outdir)
    paths = []
    labels = list(dict.fromkeys([*model.belief, *model.knowledge]))
    for label in labels:
        panels = []
        if label in model.belief:
            panels.append((f"belief {label}", model.belief[label]))
        if label in model.knowledge:
            panels.append((f"knowledge {label}", model.knowledge[label]))
        paths.append(relation_panels(panels, outdir / f"relations_{label}.png"))
    return paths


def law_summary(reports, path) -> Path:
    """Stacked bars: valid vs falsified instances of each law id."""
    valid = Counter(r.law for r in reports if r.status == "valid-in-model")
    bad = Counter(r.law for r in reports if r.status != "valid-in-model")
    laws = sorted(set(valid) | set(bad))
    fig = _new_figure(1, size=max(4.0, 0.28 * len(laws) + 1.5))
    ax = fig.add_subplot(1, 1, 1)
    y = np.arange(len(laws))
    ok = np.array([valid[law] for law in laws])
    ko = np.array([bad[law] for law in laws])
    ax.barh(y, ok, color="0.55", label="valid")
    ax.barh(y, ko, left=ok, color="tab:red", label="falsified")
    ax.set_yticks(y)
    ax.set_yticklabels(laws)
    ax.invert_yaxis()
    ax.set_xlabel("reports")
    ax.legend(loc="lower right", frameon=False)
    return _save(fig, path)
