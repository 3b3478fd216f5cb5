"""Shared fixtures and random-state factories for the test suite."""

import numpy as np
import pytest

from relaxometer.states import DensityMatrix, StateVector


def random_state(rng, L):
    """Haar-like random pure state on L sites (complex Gaussian amplitudes)."""
    amp = rng.standard_normal(2**L) + 1j * rng.standard_normal(2**L)
    return StateVector(amp / np.linalg.norm(amp), L)


def random_density(rng, dim, rank=None, num_sites=None):
    """Random density matrix from a Ginibre factor of the given rank."""
    if rank is None:
        rank = dim
    if num_sites is None:
        num_sites = int(np.log2(dim))
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    mat = g @ g.conj().T
    return DensityMatrix(mat / np.trace(mat).real, num_sites, validate=False)


def random_hermitian(rng, dim):
    """GOE-like random real-symmetric matrix."""
    m = rng.standard_normal((dim, dim))
    return (m + m.T) / 2.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
