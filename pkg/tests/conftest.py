"""Shared fixtures and random parameter draws for the test suite."""

import numpy as np
import pytest

from cavityqsl import LorentzianBath, OhmicBath, SystemParams


@pytest.fixture
def rng():
    return np.random.default_rng(20260817)


def random_lorentzian(rng, detuned: bool = True) -> SystemParams:
    """Draw within the documented ranges (gamma0 = 1 reference units)."""
    lam = float(10.0 ** rng.uniform(-2.0, 1.0))
    coupling = float(rng.uniform(0.0, 5.0))
    delta = float(rng.uniform(0.0, 25.0)) if detuned else 0.0
    return SystemParams(50.0, coupling, LorentzianBath(1.0, lam, delta))


def random_ohmic(rng) -> SystemParams:
    """Draw within the documented ranges (omega0 = 1 reference units).

    The coupling is capped below omega0: beyond it the lower dressed
    level sinks under the ground state and the model leaves its domain
    of validity.
    """
    omega_c = float(10.0 ** rng.uniform(np.log10(0.05), 1.0))
    coupling = float(rng.uniform(0.0, 0.98))
    return SystemParams(1.0, coupling, OhmicBath(omega_c))


def random_tau(rng) -> float:
    return float(rng.uniform(0.2, 5.0))


def random_state(rng):
    """Random qubit state: Bloch vector of length <= 1."""
    from cavityqsl import QubitState

    u = rng.uniform(-1.0, 1.0)
    theta = float(np.arccos(u))
    phi = float(rng.uniform(0.0, 2.0 * np.pi))
    r = float(rng.uniform(0.0, 1.0) ** (1.0 / 3.0))
    z = r * np.cos(theta)
    rho11 = 0.5 * (1.0 + z)
    rho10 = 0.5 * r * np.sin(theta) * np.exp(-1j * phi)
    return QubitState(rho11, complex(rho10))
