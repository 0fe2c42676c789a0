"""Reservoir spectral densities and dressed-state decay rates.

A two-level atom couples to a single cavity mode with strength Omega; the
cavity leaks into a structured reservoir.  In the one-excitation sector the
dressed doublet decays through two independent channels with transition
frequencies

    w1 = omega0 - Omega,    w2 = omega0 + Omega.

Each channel sees the reservoir through a time-dependent rate

    gamma_j(t) = 2 Re int_0^t dtau int dw' exp(i (w_j - w') tau) J(w'),

and the accumulated decay is beta_j(t) = int_0^t gamma_j(t') dt'.  Both
integrals have closed forms for the two supported reservoir families:

* Lorentzian, J(w') = (g0 l^2 / 2 pi) / ((omega0 - w' - delta)^2 + l^2).
  Natural units g0 = 1; the peak sits at omega0 - delta and l is the
  spectral width (memory time 1/l).
* Ohmic with a Lorentz-Drude cutoff, J(w') = (2 w' / pi) wc^2 / (wc^2 + w'^2).
  Natural units omega0 = 1.

`decay_rate` and `beta` evaluate the closed forms; `oracle.decay_rate_bruteforce`
recomputes gamma_j from the double integral for validation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "LorentzianBath",
    "OhmicBath",
    "SpectralModel",
    "SystemParams",
    "dressed_frequencies",
    "spectral_density",
    "decay_rate",
    "beta",
]


@dataclass(frozen=True)
class LorentzianBath:
    """Lorentzian reservoir in units of the Markovian rate gamma0.

    Parameters
    ----------
    gamma0 : float
        Markovian decay rate setting the time unit.  Canonical runs use 1.
    lam : float
        Spectral width.  lam >> gamma0 is the flat (Markovian) regime,
        lam << gamma0 the strongly non-Markovian one.
    delta : float
        Detuning of the spectral peak from the bare atomic frequency.
    """

    gamma0: float = 1.0
    lam: float = 5.0
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.gamma0 <= 0:
            raise ValueError(f"gamma0 must be positive, got {self.gamma0}")
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")


@dataclass(frozen=True)
class OhmicBath:
    """Ohmic reservoir with Lorentz-Drude cutoff, in units of omega0.

    Parameters
    ----------
    omega_c : float
        Cutoff frequency.  omega_c >> omega0 approaches the memoryless
        limit; omega_c << omega0 gives long reservoir memory.
    """

    omega_c: float

    def __post_init__(self) -> None:
        if self.omega_c <= 0:
            raise ValueError(f"omega_c must be positive, got {self.omega_c}")


SpectralModel = Union[LorentzianBath, OhmicBath]


@dataclass(frozen=True)
class SystemParams:
    """Atom-cavity system coupled to a structured reservoir.

    Parameters
    ----------
    omega0 : float
        Bare atomic transition frequency.
    coupling : float
        Atom-cavity coupling Omega, half the splitting of the dressed doublet.
    model : SpectralModel
        Reservoir seen by the cavity mode.
    """

    omega0: float
    coupling: float
    model: SpectralModel

    def __post_init__(self) -> None:
        if self.omega0 <= 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.coupling < 0:
            raise ValueError(f"coupling must be non-negative, got {self.coupling}")
        if isinstance(self.model, OhmicBath) and self.coupling > self.omega0:
            # Beyond this the lower dressed level drops below the ground
            # state and the zero-temperature channel would pump it.
            raise ValueError(
                "Ohmic runs require coupling <= omega0 "
                f"(got coupling={self.coupling}, omega0={self.omega0})"
            )


def dressed_frequencies(sys: SystemParams) -> tuple[float, float]:
    """Transition frequencies (w1, w2) of the dressed doublet to the ground state."""
    return sys.omega0 - sys.coupling, sys.omega0 + sys.coupling


def _branch_frequency(sys: SystemParams, j: int) -> float:
    if j not in (1, 2):
        raise ValueError(f"channel index must be 1 or 2, got {j}")
    return dressed_frequencies(sys)[j - 1]


def spectral_density(sys: SystemParams, omega_prime) -> np.ndarray | float:
    """Reservoir spectral density J(w') for the system's model.

    The Lorentzian density is centred at omega0 - delta; the Ohmic one is an
    odd function of w', linear at small frequency with a soft cutoff at
    omega_c.
    """
    w = np.asarray(omega_prime, dtype=float)
    m = sys.model
    if isinstance(m, LorentzianBath):
        out = (m.gamma0 * m.lam**2 / (2.0 * np.pi)) / (
            (sys.omega0 - w - m.delta) ** 2 + m.lam**2
        )
    else:
        out = (2.0 * w / np.pi) * m.omega_c**2 / (m.omega_c**2 + w**2)
    return out if np.ndim(omega_prime) else float(out)


def _check_time(t: np.ndarray) -> None:
    if np.any(t < 0):
        raise ValueError("time must be non-negative")


def decay_rate(sys: SystemParams, j: int, t) -> np.ndarray | float:
    """Time-dependent decay rate gamma_j(t) of dressed channel j.

    Closed forms (x_j = omega0 - w_j - delta for the Lorentzian case):

        Lorentzian:
            gamma_j = g0 l^2 / (x_j^2 + l^2)
                      * (1 + ((x_j/l) sin(x_j t) - cos(x_j t)) e^(-l t))
        Ohmic:
            gamma_j = 4 wc^2 / (w_j^2 + wc^2)
                      * (w_j (1 - e^(-wc t) cos(w_j t)) - wc e^(-wc t) sin(w_j t))

    Both vanish at t = 0 and approach the Markovian plateau on the
    reservoir memory time.  Transient negative excursions are the
    non-Markovian backflow windows.
    """
    tt = np.asarray(t, dtype=float)
    _check_time(tt)
    wj = _branch_frequency(sys, j)
    m = sys.model
    if isinstance(m, LorentzianBath):
        x = sys.omega0 - wj - m.delta
        l = m.lam
        pref = m.gamma0 * l**2 / (x**2 + l**2)
        out = pref * (1.0 + ((x / l) * np.sin(x * tt) - np.cos(x * tt)) * np.exp(-l * tt))
    else:
        wc = m.omega_c
        pref = 4.0 * wc**2 / (wj**2 + wc**2)
        env = np.exp(-wc * tt)
        out = pref * (wj * (1.0 - env * np.cos(wj * tt)) - wc * env * np.sin(wj * tt))
    return out if np.ndim(t) else float(out)


def beta(sys: SystemParams, j: int, t) -> np.ndarray | float:
    """Accumulated decay beta_j(t) = int_0^t gamma_j dt', in closed form.

    Lorentzian (x_j as in `decay_rate`; the expression is even in x_j and
    regular at x_j = 0):

        beta_j = g0 l^2 / (x_j^2 + l^2) * [ t
                 - 2 x_j e^(-l t) sin(x_j t) / (x_j^2 + l^2)
                 + (l^2 - x_j^2) (e^(-l t) cos(x_j t) - 1) / (l (x_j^2 + l^2)) ]

    Ohmic:

        beta_j = 4 wc^2 / (w_j^2 + wc^2)^2 * [ (w_j^2 + wc^2) w_j t
                 + 2 wc w_j (e^(-wc t) cos(w_j t) - 1)
                 - (w_j^2 - wc^2) e^(-wc t) sin(w_j t) ]
    """
    tt = np.asarray(t, dtype=float)
    _check_time(tt)
    wj = _branch_frequency(sys, j)
    m = sys.model
    if isinstance(m, LorentzianBath):
        x = sys.omega0 - wj - m.delta
        l = m.lam
        d = x**2 + l**2
        env = np.exp(-l * tt)
        out = (m.gamma0 * l**2 / d) * (
            tt
            - 2.0 * x * env * np.sin(x * tt) / d
            + (l**2 - x**2) * (env * np.cos(x * tt) - 1.0) / (l * d)
        )
    else:
        wc = m.omega_c
        d = wj**2 + wc**2
        env = np.exp(-wc * tt)
        out = (4.0 * wc**2 / d**2) * (
            d * wj * tt
            + 2.0 * wc * wj * (env * np.cos(wj * tt) - 1.0)
            - (wj**2 - wc**2) * env * np.sin(wj * tt)
        )
    return out if np.ndim(t) else float(out)
