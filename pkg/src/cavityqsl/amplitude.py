"""Exact excited-state amplitude and reduced dynamics of the atom.

Starting from the one-excitation sector with the cavity in vacuum, the
excited-state probability amplitude is a sum over the two dressed channels,

    A(t) = (1/2) sum_j exp(-i w_j t) exp(-beta_j(t) / 4),    A(0) = 1,

and the reduced atomic state evolves as pure amplitude damping:

    rho11(t) = |A(t)|^2 rho11(0),      rho10(t) = A(t) rho10(0).

The same dynamics can be written in time-local form with a frequency shift
S(t) = -2 Im(A'/A) and a decay rate Gamma(t) = -2 Re(A'/A); both blow up
wherever A(t) crosses zero, which happens for the resonant Lorentzian
reservoir where |A|^2 = exp(-beta/2) cos^2(Omega t).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .spectral import SystemParams, beta, decay_rate, dressed_frequencies

__all__ = [
    "QubitState",
    "validate_state",
    "amplitude",
    "amplitude_rate",
    "excited_population",
    "population_rate",
    "atom_state",
    "TimeLocalCoefficients",
    "time_local_coefficients",
    "SegmentDecomposition",
    "monotone_segments",
    "Trajectory",
    "sample_trajectory",
]

#: |A(t)| below which the time-local coefficients are treated as singular.
SINGULAR_AMPLITUDE = 1e-9


@dataclass(frozen=True)
class QubitState:
    """Atomic density matrix [[rho11, rho10], [conj(rho10), 1 - rho11]].

    rho11 is the excited-state population, rho10 the coherence.  Use
    `validate_state` to check physicality; the container itself does not,
    so numerically noisy trajectory samples remain representable.
    """

    rho11: float
    rho10: complex

    @classmethod
    def excited(cls) -> "QubitState":
        return cls(1.0, 0.0 + 0.0j)

    @classmethod
    def ground(cls) -> "QubitState":
        return cls(0.0, 0.0 + 0.0j)

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "QubitState":
        """Pure state at polar angle theta, azimuth phi (excited = north pole)."""
        return cls(
            float(np.cos(theta / 2.0) ** 2),
            0.5 * np.sin(theta) * np.exp(-1j * phi),
        )

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.rho11, self.rho10],
                [np.conj(self.rho10), 1.0 - self.rho11],
            ],
            dtype=complex,
        )


def validate_state(state: QubitState, tol: float = 1e-12) -> None:
    """Raise ValueError unless `state` is a physical qubit state within tol."""
    p = state.rho11
    if not (-tol <= p <= 1.0 + tol):
        raise ValueError(f"rho11 out of [0, 1]: {p}")
    if p * (1.0 - p) - abs(state.rho10) ** 2 < -tol:
        raise ValueError(
            f"state not positive semidefinite: rho11={p}, |rho10|={abs(state.rho10)}"
        )


def amplitude(sys: SystemParams, t) -> np.ndarray | complex:
    """Excited-state amplitude A(t), vectorised over t."""
    tt = np.asarray(t, dtype=float)
    w1, w2 = dressed_frequencies(sys)
    out = 0.5 * (
        np.exp(-1j * w1 * tt - 0.25 * beta(sys, 1, tt))
        + np.exp(-1j * w2 * tt - 0.25 * beta(sys, 2, tt))
    )
    return out if np.ndim(t) else complex(out)


def amplitude_rate(sys: SystemParams, t) -> np.ndarray | complex:
    """Analytic time derivative A'(t).

    Each channel contributes (-i w_j - gamma_j(t)/4) times its amplitude
    factor, so A'(0) = -i omega0 exactly.
    """
    tt = np.asarray(t, dtype=float)
    out = 0.0
    for j, wj in zip((1, 2), dressed_frequencies(sys)):
        out = out + 0.5 * (-1j * wj - 0.25 * decay_rate(sys, j, tt)) * np.exp(
            -1j * wj * tt - 0.25 * beta(sys, j, tt)
        )
    return out if np.ndim(t) else complex(out)


def excited_population(sys: SystemParams, t) -> np.ndarray | float:
    """|A(t)|^2, the excited-state population for rho(0) = |e><e|."""
    a = amplitude(sys, t)
    out = np.abs(a) ** 2
    return out if np.ndim(t) else float(out)


def population_rate(sys: SystemParams, t) -> np.ndarray | float:
    """d|A|^2/dt = 2 Re(conj(A) A'), vectorised over t."""
    out = 2.0 * np.real(np.conj(amplitude(sys, t)) * amplitude_rate(sys, t))
    return out if np.ndim(t) else float(out)


def atom_state(sys: SystemParams, rho0: QubitState, t: float) -> QubitState:
    """Reduced atomic state at time t for the initial state rho0."""
    validate_state(rho0)
    if t < 0:
        raise ValueError("time must be non-negative")
    a = amplitude(sys, t)
    pop = abs(a) ** 2
    return QubitState(pop * rho0.rho11, a * rho0.rho10)


class TimeLocalCoefficients(NamedTuple):
    """Shift S(t) and rate Gamma(t) of the time-local generator.

    `singular` marks times where |A(t)| < SINGULAR_AMPLITUDE; there the
    generator does not exist and shift/rate are NaN.
    """

    shift: float
    rate: float
    singular: bool


def time_local_coefficients(sys: SystemParams, t: float) -> TimeLocalCoefficients:
    """S(t) = -2 Im(A'/A) and Gamma(t) = -2 Re(A'/A) at time t."""
    if t < 0:
        raise ValueError("time must be non-negative")
    a = amplitude(sys, t)
    if abs(a) < SINGULAR_AMPLITUDE:
        return TimeLocalCoefficients(float("nan"), float("nan"), True)
    ratio = amplitude_rate(sys, t) / a
    return TimeLocalCoefficients(-2.0 * ratio.imag, -2.0 * ratio.real, False)


@dataclass(frozen=True)
class SegmentDecomposition:
    """Monotonicity structure of |A(t)|^2 on [0, tau].

    roots are the interior sign changes of d|A|^2/dt, refined to better than
    1e-10 in time; intervals tile [0, tau] with a flag per interval that is
    True where the population increases.
    """

    tau: float
    roots: np.ndarray
    intervals: tuple[tuple[float, float, bool], ...]

    def rising(self) -> tuple[tuple[float, float], ...]:
        return tuple((a, b) for a, b, up in self.intervals if up)


def _scan_size(sys: SystemParams, tau: float) -> int:
    # Content frequencies: doublet beat 2 Omega, oscillation of beta_j at
    # |x_j| (Lorentzian) or w_j (Ohmic), envelope rate lam or omega_c.
    m = sys.model
    if hasattr(m, "lam"):
        scale = 2.0 * sys.coupling + sys.coupling + abs(m.delta) + m.lam
    else:
        scale = 2.0 * sys.coupling + sys.omega0 + sys.coupling + m.omega_c
    cycles = scale * tau / (2.0 * np.pi)
    return int(min(400_000, max(1024, 96 * np.ceil(cycles) + 1024)))


def monotone_segments(sys: SystemParams, tau: float) -> SegmentDecomposition:
    """Locate the monotone segments of |A(t)|^2 on [0, tau].

    A dense scan of the analytic population rate brackets every sign change;
    each bracket is refined with a safeguarded bisection (Brent) to machine
    resolution.  d|A|^2/dt vanishes identically at t = 0, so the first
    sample takes the sign of the earliest nonzero value.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    n = _scan_size(sys, tau)
    grid = np.linspace(0.0, tau, n + 1)
    rate = population_rate(sys, grid)

    sign = np.sign(rate)
    nonzero = np.flatnonzero(sign)
    if nonzero.size == 0:
        return SegmentDecomposition(tau, np.array([]), ((0.0, tau, False),))
    # Propagate the previous nonzero sign through exact zeros (t = 0 always).
    for i in range(len(sign)):
        if sign[i] == 0:
            sign[i] = sign[i - 1] if i > 0 else sign[nonzero[0]]

    flips = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    roots = []
    f = lambda t: population_rate(sys, float(t))
    for i in flips:
        lo, hi = grid[i], grid[i + 1]
        if rate[i] == 0.0:  # exact grid hit; the flip is at the sample itself
            roots.append(lo)
            continue
        roots.append(brentq(f, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=200))
    roots = np.array(sorted(roots))
    eps = 1e-12 * max(1.0, tau)
    roots = roots[(roots > eps) & (roots < tau - eps)]

    bounds = np.concatenate(([0.0], roots, [tau]))
    intervals = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        mid = 0.5 * (a + b)
        intervals.append((float(a), float(b), population_rate(sys, mid) > 0.0))
    return SegmentDecomposition(tau, roots, tuple(intervals))


@dataclass(frozen=True)
class Trajectory:
    """Sampled trajectory of the amplitude and derived quantities.

    gamma_t and shift_t are NaN at samples flagged singular (|A| below
    SINGULAR_AMPLITUDE); they are never interpolated across the zeros.
    """

    times: np.ndarray
    amp: np.ndarray
    pop: np.ndarray
    pop_rate: np.ndarray
    gamma_t: np.ndarray
    shift_t: np.ndarray
    singular: np.ndarray


def sample_trajectory(sys: SystemParams, tau: float, n: int = 400) -> Trajectory:
    """Sample the dynamics on n uniform points of [0, tau] plus refinements.

    The uniform grid is augmented with the located sign changes of the
    population rate so every monotone segment boundary appears exactly.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if n < 2:
        raise ValueError("need at least 2 grid points")
    seg = monotone_segments(sys, tau)
    times = np.unique(np.concatenate((np.linspace(0.0, tau, n), seg.roots)))
    amp = amplitude(sys, times)
    pop = np.abs(amp) ** 2
    rate = 2.0 * np.real(np.conj(amp) * amplitude_rate(sys, times))
    singular = np.abs(amp) < SINGULAR_AMPLITUDE
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = amplitude_rate(sys, times) / amp
    gamma_t = np.where(singular, np.nan, -2.0 * ratio.real) + 0.0
    shift_t = np.where(singular, np.nan, -2.0 * ratio.imag) + 0.0
    return Trajectory(times, amp, pop, rate, gamma_t, shift_t, singular)
