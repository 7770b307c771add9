"""Shared fixtures and independent oracles.

The oracles below use closed forms and scipy/numpy primitives only; none of
them call into the package's evaluation paths.
"""

import math

import numpy as np
import pytest
import scipy.linalg
from scipy.special import eval_laguerre

from quasiphase import (
    DensityMatrix,
    StateVector,
    TruncatedFockSpace,
    coherent_state,
    number_state,
)


def wigner_fock_closed(n, alpha):
    """(2/pi) (-1)^n exp(-2|alpha|^2) L_n(4|alpha|^2)."""
    r2 = np.abs(alpha) ** 2
    return 2 / np.pi * (-1) ** n * np.exp(-2 * r2) * eval_laguerre(n, 4 * r2)


def wigner_coherent_closed(gamma, alpha):
    return 2 / np.pi * np.exp(-2 * np.abs(alpha - gamma) ** 2)


def coherent_amplitudes_closed(alpha, dim):
    """Untruncated-normalization amplitudes e^{-|a|^2/2} a^n / sqrt(n!)."""
    return np.array(
        [math.exp(-abs(alpha) ** 2 / 2) * alpha**n / math.sqrt(math.factorial(n)) for n in range(dim)],
        dtype=complex,
    )


def expm_antihermitian_oracle(generator):
    """exp(X) for anti-Hermitian X through the eigendecomposition of iX."""
    vals, vecs = scipy.linalg.eigh(1j * generator)
    return (vecs * np.exp(-1j * vals)) @ vecs.conj().T


def random_pure_state(rng, space, support=10):
    amps = np.zeros(space.dim, dtype=complex)
    amps[:support] = rng.normal(size=support) + 1j * rng.normal(size=support)
    return StateVector.normalized(space, amps)


def random_mixed_state(rng, space, rank=3, support=8):
    states = [random_pure_state(rng, space, support) for _ in range(rank)]
    return DensityMatrix.mixture(states, rng.uniform(0.1, 1.0, size=rank))


def even_cat(space, gamma):
    amps = coherent_state(space, gamma).amplitudes + coherent_state(space, -gamma).amplitudes
    return StateVector.normalized(space, amps)


@pytest.fixture(scope="session")
def space64():
    return TruncatedFockSpace(64)


@pytest.fixture(scope="session")
def space32():
    return TruncatedFockSpace(32)


@pytest.fixture
def rng():
    return np.random.default_rng(20260415)


@pytest.fixture(scope="session")
def vacuum64(space64):
    return number_state(space64, 0)
