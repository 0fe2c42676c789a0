"""Parameter sweeps of the backflow metrics and transition location.

A sweep evaluates `evaluate_metrics` on a grid of coupling or detuning
values around a fixed base system.  `find_critical` bisects the swept
parameter against the predicate N > threshold to localise the onset of
information backflow.  `figure_dataset` bundles the preset curve families
used throughout the docs (fig1/fig2/fig3).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .metrics import evaluate_metrics
from .spectral import LorentzianBath, OhmicBath, SystemParams

__all__ = [
    "SweepSpec",
    "SweepRow",
    "CriticalPoint",
    "NoBracketError",
    "run_sweep",
    "find_critical",
    "FigureCurve",
    "FigureDataset",
    "figure_curves",
    "figure_dataset",
    "write_csv",
    "CSV_HEADER",
]

CSV_HEADER = "param,n_blp,qslt_ratio,final_pop"

_TARGETS = ("Omega", "delta")


class NoBracketError(ValueError):
    """The backflow predicate does not change sign across the range."""


@dataclass(frozen=True)
class SweepSpec:
    """Grid description for one swept parameter.

    Parameters
    ----------
    target : str
        Swept parameter, "Omega" (atom-cavity coupling) or "delta"
        (Lorentzian detuning).
    lo, hi : float
        Range in reference units; lo < hi.
    steps : int
        Grid count, at least 2.
    tau : float
        Driving time for the metrics.
    base : SystemParams
        Template holding every fixed parameter; the swept field is
        replaced point by point.
    """

    target: str
    lo: float
    hi: float
    steps: int
    tau: float
    base: SystemParams

    def __post_init__(self) -> None:
        if self.target not in _TARGETS:
            raise ValueError(f"target must be one of {_TARGETS}, got {self.target!r}")
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.steps < 2:
            raise ValueError(f"steps must be at least 2, got {self.steps}")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.target == "delta" and not isinstance(self.base.model, LorentzianBath):
            raise ValueError("delta sweeps are defined only for the Lorentzian family")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)

    def system_at(self, value: float) -> SystemParams:
        if self.target == "Omega":
            return replace(self.base, coupling=float(value))
        model = replace(self.base.model, delta=float(value))
        return replace(self.base, model=model)


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a sweep; `error` is set when the point failed."""

    param: float
    n_blp: float
    qslt_ratio: float
    final_pop: float
    error: str | None = None


@dataclass(frozen=True)
class CriticalPoint:
    """Bisection result for the backflow onset."""

    value: float
    bracket: tuple[float, float]
    threshold: float
    tau: float


def _eval_point(args: tuple[SweepSpec, float]) -> SweepRow:
    spec, value = args
    try:
        m = evaluate_metrics(spec.system_at(value), spec.tau)
        return SweepRow(float(value), m.n_blp, m.qslt_ratio, m.final_pop)
    except Exception as exc:  # noqa: BLE001 - a bad point must not kill the sweep
        return SweepRow(float(value), np.nan, np.nan, np.nan, error=str(exc))


def run_sweep(spec: SweepSpec, workers: int = 1) -> tuple[SweepRow, ...]:
    """Evaluate the metrics over the grid, ordered by parameter value.

    Points are independent; with workers > 1 they are evaluated in a
    process pool.  The returned table does not depend on the worker
    count.  Failing points come back as NaN rows with the error message
    attached instead of aborting the sweep.
    """
    jobs = [(spec, v) for v in spec.values()]
    if workers <= 1:
        return tuple(_eval_point(job) for job in jobs)
    chunk = max(1, len(jobs) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return tuple(pool.map(_eval_point, jobs, chunksize=chunk))


def find_critical(
    spec: SweepSpec, threshold: float = 1e-6, xtol: float = 1e-3
) -> CriticalPoint:
    """Bisect the swept parameter against the predicate N > threshold.

    The grid range is the initial bracket: N(lo) must be at or below the
    threshold and N(hi) above it, otherwise `NoBracketError` is raised.
    Bisection stops when the bracket is narrower than `xtol`.
    """

    def n_at(value: float) -> float:
        return evaluate_metrics(spec.system_at(value), spec.tau).n_blp

    lo, hi = float(spec.lo), float(spec.hi)
    if n_at(lo) > threshold:
        raise NoBracketError(
            f"N already exceeds {threshold:g} at the lower end {lo:g}"
        )
    if n_at(hi) <= threshold:
        raise NoBracketError(f"N stays at or below {threshold:g} up to {hi:g}")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if n_at(mid) > threshold:
            hi = mid
        else:
            lo = mid
    return CriticalPoint(0.5 * (lo + hi), (lo, hi), threshold, spec.tau)


# ---------------------------------------------------------------------------
# Preset curve families


@dataclass(frozen=True)
class FigureCurve:
    """One labeled curve of a preset figure."""

    label: str
    spec: SweepSpec


@dataclass(frozen=True)
class FigureDataset:
    """All curves of a preset figure plus their computed tables."""

    figure_id: str
    tau: float
    steps: int
    curves: tuple[FigureCurve, ...]
    tables: dict[str, tuple[SweepRow, ...]]


def _slug(value: float) -> str:
    return f"{value:g}".replace(".", "p").replace("-", "m")


def figure_curves(
    figure_id: str, tau: float | None = None, steps: int = 400
) -> tuple[float, tuple[FigureCurve, ...]]:
    """Curve specs of a preset figure; returns (tau, curves).

    fig1: N and ratio vs coupling, Lorentzian lambda in {5, 0.01}, delta=0.
    fig2: vs detuning at coupling 0.01, lambda in {5, 3, 1, 0.5}.
    fig3: vs coupling, Ohmic omega_c in {10, 2, 0.3, 0.1}.

    tau defaults to 1 (fig1/fig2) or 8.73 (fig3) reference time units.
    """
    if figure_id in ("fig1", "fig2"):
        t = 1.0 if tau is None else float(tau)
        if figure_id == "fig1":
            lams, target, lo, hi, coupling, delta = (5.0, 0.01), "Omega", 0.0, 4.0, 0.0, 0.0
        else:
            lams, target, lo, hi, coupling, delta = (5.0, 3.0, 1.0, 0.5), "delta", 0.0, 25.0, 0.01, 0.0
        curves = []
        for lam in lams:
            base = SystemParams(
                omega0=50.0,
                coupling=coupling,
                model=LorentzianBath(gamma0=1.0, lam=lam, delta=delta),
            )
            curves.append(
                FigureCurve(
                    f"lambda_{_slug(lam)}",
                    SweepSpec(target, lo, hi, steps, t, base),
                )
            )
        return t, tuple(curves)
    if figure_id == "fig3":
        t = 8.73 if tau is None else float(tau)
        curves = []
        for wc in (10.0, 2.0, 0.3, 0.1):
            base = SystemParams(omega0=1.0, coupling=0.0, model=OhmicBath(omega_c=wc))
            curves.append(
                FigureCurve(
                    f"omega_c_{_slug(wc)}",
                    SweepSpec("Omega", 0.0, 1.0, steps, t, base),
                )
            )
        return t, tuple(curves)
    raise ValueError(f"unknown figure id {figure_id!r} (expected fig1|fig2|fig3)")


def figure_dataset(
    figure_id: str,
    tau: float | None = None,
    steps: int = 400,
    workers: int = 1,
) -> FigureDataset:
    """Compute every curve of a preset figure."""
    t, curves = figure_curves(figure_id, tau, steps)
    tables = {c.label: run_sweep(c.spec, workers=workers) for c in curves}
    return FigureDataset(figure_id, t, steps, curves, tables)


def write_csv(rows, path) -> None:
    """Write a sweep table atomically with the fixed four-column header."""
    path = os.fspath(path)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows:
            fh.write(
                f"{r.param:.12g},{r.n_blp:.12g},{r.qslt_ratio:.12g},{r.final_pop:.12g}\n"
            )
    os.replace(tmp, path)
