"""Independent brute-force checks of the closed-form dynamics.

Nothing here reuses the closed forms it is meant to validate:

* `decay_rate_bruteforce` evaluates the defining double integral of
  gamma_j(t) numerically (oscillatory quadrature in w', adaptive in tau).
* `evolve_time_local` integrates the time-local master equation driven by
  the shift/rate coefficients.
* `evolve_dressed` integrates the three-level master equation in the
  dressed basis with the closed-form rates as inputs and maps back to the
  atom.
* `pair_search` maximises the information-backflow functional over random
  state pairs and reports the maximiser.

The ODE oracles use an embedded Dormand-Prince 5(4) pair with adaptive
steps so rejected-step counts, local error estimates, and per-step trace
deviations can be reported.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import minimize_scalar
from scipy.special import sici

from .amplitude import (
    QubitState,
    amplitude,
    excited_population,
    monotone_segments,
    time_local_coefficients,
    validate_state,
)
from .spectral import (
    LorentzianBath,
    SystemParams,
    dressed_frequencies,
    spectral_density,
)

__all__ = [
    "OracleConvergenceError",
    "StepStats",
    "OdeResult",
    "decay_rate_bruteforce",
    "evolve_time_local",
    "evolve_dressed",
    "PairSearchResult",
    "pair_search",
]


class OracleConvergenceError(RuntimeError):
    """A brute-force integral failed to reach its accuracy target."""


# ---------------------------------------------------------------------------
# Embedded Dormand-Prince 5(4) pair


_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = (
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
)
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


@dataclass(frozen=True)
class StepStats:
    """Bookkeeping of one adaptive integration."""

    accepted: int
    rejected: int
    max_error: float
    max_trace_dev: float


def _integrate_dp54(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t_eval: np.ndarray,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    monitor: Callable[[np.ndarray], float] | None = None,
    max_steps: int = 2_000_000,
) -> tuple[np.ndarray, StepStats]:
    """Integrate y' = rhs(t, y) and sample at t_eval (t_eval[0] is t0).

    Steps are clamped to land on every sample time exactly, so no dense
    interpolation is involved.  `monitor` maps a state to a scalar deviation
    (trace error) recorded at every accepted step.
    """
    y = np.array(y0, dtype=complex)
    t = float(t_eval[0])
    out = np.empty((len(t_eval), y.size), dtype=complex)
    out[0] = y
    idx = 1

    k = np.empty((7, y.size), dtype=complex)
    k[0] = rhs(t, y)
    span = float(t_eval[-1] - t)
    scale0 = atol + rtol * np.max(np.abs(y))
    h = min(span / 100.0, 0.1 * scale0 / (np.max(np.abs(k[0])) + 1e-30))
    h = max(h, 1e-12 * span)

    accepted = rejected = 0
    max_err = 0.0
    max_dev = 0.0
    steps = 0
    while idx < len(t_eval):
        if steps >= max_steps:
            raise RuntimeError(f"step budget exhausted at t={t!r}")
        steps += 1
        target = float(t_eval[idx])
        clamped = t + h >= target
        h_step = target - t if clamped else h
        if h_step < 1e-15 * max(1.0, abs(t)):
            raise RuntimeError(f"step size underflow at t={t!r} (h={h_step!r})")

        for i in range(1, 7):
            k[i] = rhs(t + _DP_C[i] * h_step, y + h_step * (_DP_A[i] @ k[:i]))
        y5 = y + h_step * (_DP_B5 @ k)
        err = h_step * ((_DP_B5 - _DP_B4) @ k)
        sc = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err_norm = float(np.sqrt(np.mean(np.abs(err / sc) ** 2)))

        if err_norm <= 1.0:
            accepted += 1
            max_err = max(max_err, err_norm)
            t = target if clamped else t + h_step
            y = y5
            k[0] = k[6]  # first-same-as-last
            if monitor is not None:
                max_dev = max(max_dev, monitor(y))
            if clamped:
                out[idx] = y
                idx += 1
            factor = 5.0 if err_norm == 0.0 else min(5.0, 0.9 * err_norm**-0.2)
            h = max(h, h_step) * factor if clamped else h_step * factor
        else:
            rejected += 1
            h = h_step * max(0.2, 0.9 * err_norm**-0.2)
    return out, StepStats(accepted, rejected, max_err, max_dev)


@dataclass(frozen=True)
class OdeResult:
    """Sampled atomic trajectory from a brute-force integration."""

    times: np.ndarray
    states: tuple[QubitState, ...]
    step_stats: StepStats
    flagged: bool = False
    min_amplitude: float | None = None

    def populations(self) -> np.ndarray:
        return np.array([s.rho11 for s in self.states])

    def coherences(self) -> np.ndarray:
        return np.array([s.rho10 for s in self.states])


# ---------------------------------------------------------------------------
# Double-integral decay rate

# Width multiplier of the finite window; the integrable tail beyond it is
# added through the asymptotic terms below.
_WINDOW = 60.0


def _quad_osc(f, a: float, b: float, kind: str, w: float) -> tuple[float, float]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(
            f, a, b, weight=kind, wvar=w, epsabs=1e-12, epsrel=1e-10,
            limit=800, maxp1=100,
        )
    return val, err


def _cos_tail_u2(w_edge: float, tau: float) -> float:
    """int_W^inf cos(u tau) / u^2 du."""
    si, _ci = sici(w_edge * tau)
    return np.cos(w_edge * tau) / w_edge - tau * (0.5 * np.pi - si)


def _sin_tail_u3(w_edge: float, tau: float) -> float:
    """int_W^inf sin(u tau) / u^3 du."""
    return np.sin(w_edge * tau) / (2.0 * w_edge**2) + 0.5 * tau * _cos_tail_u2(
        w_edge, tau
    )


def _cos_tail_u4(w_edge: float, tau: float) -> float:
    """int_W^inf cos(u tau) / u^4 du."""
    return np.cos(w_edge * tau) / (3.0 * w_edge**3) - (tau / 3.0) * _sin_tail_u3(
        w_edge, tau
    )


def _sin_tail_u1(w_edge: float, tau: float) -> float:
    """int_W^inf sin(u tau) / u du."""
    si, _ci = sici(w_edge * tau)
    return 0.5 * np.pi - si


def decay_rate_bruteforce(sys: SystemParams, j: int, t: float) -> float:
    """gamma_j(t) from its defining double integral, no closed forms.

    The inner frequency integral runs over the full real line: a finite
    window around the spectral weight is handled by oscillatory-weight
    adaptive quadrature and the slowly decaying remainder by asymptotic
    tail integrals (sine/cosine integrals of 1/u^k).  The outer time
    integral is standard adaptive quadrature.
    """
    if t < 0:
        raise ValueError("time must be non-negative")
    if t == 0:
        return 0.0
    wj = _branch_freq_checked(sys, j)
    m = sys.model

    if isinstance(m, LorentzianBath):
        centre = sys.omega0 - m.delta
        x = centre - wj
        half = _WINDOW * (m.lam + abs(x) + 1.0)
        amp_tail = m.gamma0 * m.lam**2 / (2.0 * np.pi)

        def inner(tau: float) -> complex:
            jdens = lambda w: spectral_density(sys, w)
            cc, e1 = _quad_osc(jdens, centre - half, centre + half, "cos", tau)
            cs, e2 = _quad_osc(jdens, centre - half, centre + half, "sin", tau)
            _check_inner(e1 + e2)
            # Even tail about the peak: J ~ amp_tail (1/u^2 - lam^2/u^4).
            g = amp_tail * (
                _cos_tail_u2(half, tau) - m.lam**2 * _cos_tail_u4(half, tau)
            )
            cc += 2.0 * np.cos(centre * tau) * g
            cs += 2.0 * np.sin(centre * tau) * g
            return cc - 1j * cs
    else:
        half = max(_WINDOW * (m.omega_c + 1.0), 4.0 * abs(wj) + 40.0)
        amp_tail = 2.0 * m.omega_c**2 / np.pi

        def inner(tau: float) -> complex:
            jdens = lambda w: spectral_density(sys, w)
            cc, e1 = _quad_osc(jdens, -half, half, "cos", tau)
            cs, e2 = _quad_osc(jdens, -half, half, "sin", tau)
            _check_inner(e1 + e2)
            # Odd tail: the cosine part cancels, the sine part follows
            # J ~ amp_tail (1/u - omega_c^2/u^3).
            cs += 2.0 * amp_tail * (
                _sin_tail_u1(half, tau) - m.omega_c**2 * _sin_tail_u3(half, tau)
            )
            return cc - 1j * cs

    def integrand(tau: float) -> float:
        c = inner(tau)
        return 2.0 * (np.cos(wj * tau) * c.real - np.sin(wj * tau) * c.imag)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(integrand, 0.0, t, epsabs=1e-11, epsrel=1e-9, limit=400)
    if err > max(1e-7, 1e-5 * abs(val)):
        raise OracleConvergenceError(
            f"outer quadrature error {err:g} too large for gamma_{j}({t})"
        )
    return val


def _check_inner(err: float) -> None:
    if err > 1e-7:
        raise OracleConvergenceError(f"inner quadrature error {err:g} too large")


def _branch_freq_checked(sys: SystemParams, j: int) -> float:
    if j not in (1, 2):
        raise ValueError(f"channel index must be 1 or 2, got {j}")
    return dressed_frequencies(sys)[j - 1]


# ---------------------------------------------------------------------------
# Master-equation oracles


def _sample_times(tau: float, n_samples: int) -> np.ndarray:
    if tau <= 0:
        raise ValueError("tau must be positive")
    if n_samples < 2:
        raise ValueError("need at least 2 sample times")
    return np.linspace(0.0, tau, n_samples)


def _min_amplitude(sys: SystemParams, tau: float) -> float:
    """Global minimum of |A| on [0, tau], with refined local minima.

    A grid scan alone can straddle a zero crossing without seeing it, so
    every interior dip of the scan is polished by bounded minimisation.
    """
    grid = np.linspace(0.0, tau, 4001)
    # Work with |A|^2: smooth at zero crossings, so the polish converges.
    pops = np.abs(amplitude(sys, grid)) ** 2
    best = float(pops.min())
    interior = np.flatnonzero(
        (pops[1:-1] <= pops[:-2]) & (pops[1:-1] <= pops[2:])
    )
    for i in interior + 1:
        res = minimize_scalar(
            lambda t: float(np.abs(amplitude(sys, float(t))) ** 2),
            bounds=(grid[i - 1], grid[i + 1]),
            method="bounded",
            options={"xatol": 1e-14},
        )
        best = min(best, float(res.fun))
    return float(np.sqrt(max(best, 0.0)))


def evolve_time_local(
    sys: SystemParams,
    rho0: QubitState,
    tau: float,
    n_samples: int = 400,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> OdeResult:
    """Integrate the time-local master equation from rho0 over [0, tau].

    The generator uses the shift and rate coefficients; it is singular at
    amplitude zeros, so parameter sets whose amplitude crosses zero are
    rejected, and runs that come within 1e-6 of a zero are flagged.
    """
    validate_state(rho0)
    times = _sample_times(tau, n_samples)
    min_amp = _min_amplitude(sys, tau)
    if min_amp < 1e-9:
        raise ValueError(
            f"amplitude reaches {min_amp:.3e} on [0, tau]; "
            "time-local generator is singular there"
        )

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        c = time_local_coefficients(sys, t)
        return np.array(
            [
                -c.rate * y[0],
                (-0.5j * c.shift - 0.5 * c.rate) * y[1],
                c.rate * y[0],
            ],
            dtype=complex,
        )

    y0 = np.array([rho0.rho11, rho0.rho10, 1.0 - rho0.rho11], dtype=complex)
    ys, stats = _integrate_dp54(
        rhs, y0, times, rtol=rtol, atol=atol,
        monitor=lambda y: abs(y[0].real + y[2].real - 1.0),
    )
    states = tuple(QubitState(float(y[0].real), complex(y[1])) for y in ys)
    return OdeResult(times, states, stats, flagged=min_amp < 1e-6, min_amplitude=min_amp)


def evolve_dressed(
    sys: SystemParams,
    tau: float,
    n_samples: int = 400,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> OdeResult:
    """Integrate the dressed-basis master equation from the excited atom.

    The three levels are the dressed doublet and the joint ground state;
    each doublet member decays through its own channel at the closed-form
    rate.  The initial state is atom excited, cavity in vacuum, which is
    the equal antisymmetric superposition of the doublet.  The sampled
    density matrices are rotated back to the product basis and the cavity
    is traced out, so this oracle stays regular across amplitude zeros.
    """
    times = _sample_times(tau, n_samples)
    w1, w2 = dressed_frequencies(sys)
    h_diag = np.array([w2, w1, 0.0])
    lower = (
        (1, np.zeros((3, 3)), np.diag([0.0, 1.0, 0.0])),
        (2, np.zeros((3, 3)), np.diag([1.0, 0.0, 0.0])),
    )
    lower[0][1][2, 1] = 1.0  # |ground><lower branch|
    lower[1][1][2, 0] = 1.0  # |ground><upper branch|

    from .spectral import decay_rate  # local import to keep module header lean

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        rho = y.reshape(3, 3)
        out = -1j * (h_diag[:, None] - h_diag[None, :]) * rho
        for j, b, proj in lower:
            g = decay_rate(sys, j, t)
            out = out + 0.5 * g * (
                b @ rho @ b.T - 0.5 * (proj @ rho + rho @ proj)
            )
        return out.ravel()

    psi = np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0)
    rho0 = np.outer(psi, psi).astype(complex)
    ys, stats = _integrate_dp54(
        rhs, rho0.ravel(), times, rtol=rtol, atol=atol,
        monitor=lambda y: abs(np.trace(y.reshape(3, 3)).real - 1.0),
    )

    root2 = np.sqrt(0.5)
    v = np.array([[root2, root2, 0.0], [root2, -root2, 0.0], [0.0, 0.0, 1.0]])
    states = []
    for y in ys:
        rho_bare = v @ y.reshape(3, 3) @ v.T  # rows: |1,g>, |0,e>, |0,g>
        states.append(QubitState(float(rho_bare[1, 1].real), complex(rho_bare[1, 2])))
    return OdeResult(times, tuple(states), stats)


# ---------------------------------------------------------------------------
# State-pair maximisation of the backflow functional


@dataclass(frozen=True)
class PairSearchResult:
    """Best pair found by the sampled maximisation."""

    best_n: float
    best_pair: tuple[QubitState, QubitState]
    reference_n: float
    samples: int


def _pair_functional(
    pops: np.ndarray, rising: Sequence[bool], p0: float, c0_abs: float
) -> float:
    # Trace distance of the evolved pair: D = sqrt(pop^2 p0^2 + pop |c0|^2),
    # monotone in pop, so its rises coincide with the population's.
    d = np.sqrt(pops**2 * p0**2 + pops * c0_abs**2)
    total = 0.0
    for i, up in enumerate(rising):
        if up:
            total += d[i + 1] - d[i]
    return total


def pair_search(
    sys: SystemParams, tau: float, samples: int = 500, seed: int = 0
) -> PairSearchResult:
    """Maximise the backflow functional over random pure-state pairs.

    Draws antipodal pairs and fully independent pairs on the Bloch sphere
    (the excited/ground reference pair is always included), evaluates each
    pair's summed trace-distance rises over [0, tau], and returns the
    maximiser.  Ties break lexicographically on the pair encoding so the
    result is reproducible for a fixed seed.
    """
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")
    seg = monotone_segments(sys, tau)
    bounds = np.concatenate(([seg.intervals[0][0]], [b for _, b, _ in seg.intervals]))
    pops = excited_population(sys, bounds)
    rising = [up for _, _, up in seg.intervals]

    rng = np.random.default_rng(seed)
    pairs: list[tuple[QubitState, QubitState]] = [
        (QubitState.excited(), QubitState.ground())
    ]
    n_antipodal = (samples - 1) // 2
    for _ in range(n_antipodal):
        theta = float(np.arccos(rng.uniform(-1.0, 1.0)))
        phi = float(rng.uniform(0.0, 2.0 * np.pi))
        pairs.append(
            (
                QubitState.from_bloch(theta, phi),
                QubitState.from_bloch(np.pi - theta, phi + np.pi),
            )
        )
    while len(pairs) < samples:
        t1, t2 = np.arccos(rng.uniform(-1.0, 1.0, size=2))
        f1, f2 = rng.uniform(0.0, 2.0 * np.pi, size=2)
        pairs.append((QubitState.from_bloch(t1, f1), QubitState.from_bloch(t2, f2)))

    best_key = None
    best: tuple[float, tuple[QubitState, QubitState]] | None = None
    reference_n = 0.0
    for i, (s1, s2) in enumerate(pairs):
        p0 = s1.rho11 - s2.rho11
        c0 = abs(s1.rho10 - s2.rho10)
        n = _pair_functional(pops, rising, p0, c0)
        if i == 0:
            reference_n = n
        key = (n, (s1.rho11, s1.rho10.real, s1.rho10.imag,
                   s2.rho11, s2.rho10.real, s2.rho10.imag))
        if best_key is None or key > best_key:
            best_key = key
            best = (float(n), (s1, s2))
    assert best is not None
    return PairSearchResult(best[0], best[1], float(reference_n), samples)
