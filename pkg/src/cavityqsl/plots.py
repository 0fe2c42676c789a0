"""Render sweep tables to PNG files.

Uses the object-oriented matplotlib API with an explicit Agg canvas so no
global backend state is touched; safe in headless environments.
"""

from __future__ import annotations

import os

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

__all__ = ["render_metric_curves"]

_AXIS_LABELS = {"Omega": "coupling", "delta": "detuning"}
_METRICS = (("n_blp", "non-Markovianity N"), ("qslt_ratio", "QSLT ratio"))


def render_metric_curves(tables, target: str, out_dir, stem: str) -> list[str]:
    """Plot N and the QSLT ratio versus the swept parameter.

    Parameters
    ----------
    tables : dict
        Curve label -> sequence of sweep rows.
    target : str
        Swept parameter id ("Omega" or "delta"), used for the x label.
    out_dir : path-like
        Destination directory (must exist).
    stem : str
        Filename stem; files are `<stem>_non_markovianity.png` and
        `<stem>_qslt_ratio.png`.

    Returns the written file paths.
    """
    xlabel = _AXIS_LABELS.get(target, target)
    written = []
    for field, ylabel in _METRICS:
        fig = Figure(figsize=(6.4, 4.4))
        FigureCanvasAgg(fig)
        ax = fig.add_subplot(111)
        for label, rows in tables.items():
            x = np.array([r.param for r in rows])
            y = np.array([getattr(r, field) for r in rows])
            ax.plot(x, y, lw=1.2, label=label.replace("_", " "))
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        ax.legend(frameon=False, fontsize=9)
        fig.tight_layout()
        name = "non_markovianity" if field == "n_blp" else field
        path = os.path.join(os.fspath(out_dir), f"{stem}_{name}.png")
        fig.savefig(path, dpi=150)
        written.append(path)
    return written
