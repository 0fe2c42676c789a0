"""Exact reduced dynamics of a two-level atom in a lossy cavity.

The package evaluates the closed-form excited-state amplitude for a
Lorentzian or Ohmic reservoir, the derived speed-limit and information
backflow metrics, brute-force oracles that validate the closed forms, and
parameter sweeps with critical-point location.
"""

from .amplitude import (
    SINGULAR_AMPLITUDE,
    QubitState,
    SegmentDecomposition,
    TimeLocalCoefficients,
    Trajectory,
    amplitude,
    amplitude_rate,
    atom_state,
    excited_population,
    monotone_segments,
    population_rate,
    sample_trajectory,
    time_local_coefficients,
    validate_state,
)
from .metrics import (
    DEGENERATE_VARIATION,
    MetricsResult,
    evaluate_metrics,
    non_markovianity,
    qslt_ratio,
    relation_residual,
    trace_distance,
)
from .oracle import (
    OdeResult,
    OracleConvergenceError,
    PairSearchResult,
    StepStats,
    decay_rate_bruteforce,
    evolve_dressed,
    evolve_time_local,
    pair_search,
)
from .spectral import (
    LorentzianBath,
    OhmicBath,
    SpectralModel,
    SystemParams,
    beta,
    decay_rate,
    dressed_frequencies,
    spectral_density,
)
from .sweep import (
    CriticalPoint,
    SweepRow,
    SweepSpec,
    figure_dataset,
    find_critical,
    run_sweep,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "SINGULAR_AMPLITUDE",
    "DEGENERATE_VARIATION",
    "LorentzianBath",
    "OhmicBath",
    "SpectralModel",
    "SystemParams",
    "QubitState",
    "Trajectory",
    "TimeLocalCoefficients",
    "SegmentDecomposition",
    "MetricsResult",
    "OdeResult",
    "OracleConvergenceError",
    "PairSearchResult",
    "StepStats",
    "CriticalPoint",
    "SweepRow",
    "SweepSpec",
    "amplitude",
    "amplitude_rate",
    "atom_state",
    "beta",
    "decay_rate",
    "decay_rate_bruteforce",
    "dressed_frequencies",
    "evaluate_metrics",
    "evolve_dressed",
    "evolve_time_local",
    "excited_population",
    "figure_dataset",
    "find_critical",
    "monotone_segments",
    "non_markovianity",
    "pair_search",
    "population_rate",
    "qslt_ratio",
    "relation_residual",
    "run_sweep",
    "sample_trajectory",
    "spectral_density",
    "time_local_coefficients",
    "trace_distance",
    "validate_state",
    "write_csv",
]
