"""Spin-chain Hamiltonians, initial-state factories and disorder sampling.

Models (all with periodic boundary conditions, couplings as printed below):

* chaotic Ising:  H = -(1/2) sum_j (sx_j sx_{j+1} + h_x sx_j + h_z sz_j)
* TFIM:           the h_x = 0 special case of the chaotic Ising chain
* XXZ:            H = sum_j [ (1/4)(sx sx + sy sy + Delta sz sz)_{j,j+1}
                              + (1/2) h_j sz_j ]

Basis convention: site 0 is the most significant bit of the basis index and
spin-up is bit 0 (see states module).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, ResourceGuardError
from .states import StateVector

#: largest L for which dense 2^L x 2^L storage is allowed
DENSE_GUARD = 14

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SZ = np.array([[1.0, 0.0], [0.0, -1.0]])


class Model(Enum):
    CHAOTIC_ISING = "chaotic_ising"
    TFIM = "tfim"
    XXZ = "xxz"


@dataclass(frozen=True)
class ChainSpec:
    """Model family plus parameters for one chain (PBC, L >= 2)."""

    model: Model
    num_sites: int
    h_x: float = 0.0
    h_z: float = 0.0
    delta: float = 0.0
    fields: Optional[np.ndarray] = None  # XXZ on-site z fields, length L

    def __post_init__(self):
        if self.num_sites < 2:
            raise DomainError(f"need at least 2 sites, got {self.num_sites}")
        if self.model is Model.XXZ:
            f = np.zeros(self.num_sites) if self.fields is None else np.asarray(
                self.fields, dtype=float
            )
            if f.shape != (self.num_sites,):
                raise DomainError(
                    f"XXZ fields must have length {self.num_sites}, got {f.shape}"
                )
            object.__setattr__(self, "fields", f)
        elif self.fields is not None:
            raise DomainError("fields are only meaningful for the XXZ model")


@dataclass(frozen=True)
class DisorderSpec:
    """Uniform on-site disorder in [-strength, strength], reproducible by seed."""

    strength: float
    seed: int
    realization_index: int = 0

    def __post_init__(self):
        if self.strength < 0:
            raise DomainError("disorder strength must be >= 0")
        if self.realization_index < 0:
            raise DomainError("realization_index must be >= 0")


class InitialStateKind(Enum):
    RANDOM_GAUSSIAN = "random_gaussian"
    X_PLUS = "x+"
    Y_PLUS = "y+"
    Z_PLUS = "z+"
    NEEL = "neel"
    GROUND_STATE = "ground_state"


def _site_operator(op: np.ndarray, site: int, L: int) -> np.ndarray:
    """Embed an operator acting on consecutive sites starting at ``site``."""
    width = op.shape[0].bit_length() - 1
    left = np.eye(2**site)
    right = np.eye(2 ** (L - site - width))
    return np.kron(np.kron(left, op), right)


def _bond_operator(op_a: np.ndarray, op_b: np.ndarray, j: int, L: int) -> np.ndarray:
    """op_a on site j times op_b on site j+1 (cyclic), built by kron only."""
    if j + 1 < L:
        return _site_operator(np.kron(op_a, op_b), j, L)
    # wrap bond: op_b sits on site 0 (most significant bit)
    return np.kron(op_b, np.kron(np.eye(2 ** (L - 2)), op_a))


def _z_diagonal(j: int, L: int) -> np.ndarray:
    """Diagonal of sz_j in the product basis (+1 for bit 0 = spin-up)."""
    return 1.0 - 2.0 * ((np.arange(2**L) >> (L - 1 - j)) & 1)


@lru_cache(maxsize=4)
def _xxz_exchange(L: int, delta: float) -> np.ndarray:
    """Field-free part of the XXZ chain; cached across disorder realizations.

    sx sx + sy sy is real in the z product basis and the sz sz term is
    diagonal, so the whole matrix is built with real floats.
    """
    dim = 2**L
    H = np.zeros((dim, dim))
    diag = np.zeros(dim)
    for j in range(L):
        H += 0.25 * (
            _bond_operator(SX, SX, j, L) + _bond_operator(SY, SY, j, L).real
        )
        diag += 0.25 * delta * _z_diagonal(j, L) * _z_diagonal((j + 1) % L, L)
    H[np.diag_indices(dim)] += diag
    H.setflags(write=False)
    return H


def build_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """Dense 2^L x 2^L Hamiltonian for the given chain (PBC)."""
    L = spec.num_sites
    if L > DENSE_GUARD:
        raise ResourceGuardError(
            f"L={L} exceeds the dense guard ({DENSE_GUARD}); a sparse path is "
            "not provided"
        )
    dim = 2**L
    if spec.model in (Model.CHAOTIC_ISING, Model.TFIM):
        h_x = 0.0 if spec.model is Model.TFIM else spec.h_x
        H = np.zeros((dim, dim))
        diag = np.zeros(dim)
        for j in range(L):
            H -= 0.5 * _bond_operator(SX, SX, j, L)
            if h_x:
                H -= 0.5 * h_x * _site_operator(SX, j, L)
            diag -= 0.5 * spec.h_z * _z_diagonal(j, L)
        H[np.diag_indices(dim)] += diag
        return H
    H = _xxz_exchange(L, spec.delta).copy()
    diag = np.zeros(dim)
    for j in range(L):
        diag += 0.5 * spec.fields[j] * _z_diagonal(j, L)
    H[np.diag_indices(dim)] += diag
    return H


def sample_disorder(d: DisorderSpec, L: int) -> np.ndarray:
    """L i.i.d. uniform fields in [-h, h], bit-reproducible per (seed, index, L).

    Each realization gets an independent child stream, so parallel
    realizations never share generator state.
    """
    ss = np.random.SeedSequence(entropy=d.seed, spawn_key=(d.realization_index,))
    rng = np.random.default_rng(ss)
    return rng.uniform(-d.strength, d.strength, size=L)


def xxz_spec(L: int, delta: float, disorder: Optional[DisorderSpec] = None) -> ChainSpec:
    """Convenience constructor: XXZ chain with sampled (or zero) random fields."""
    fields = None if disorder is None else sample_disorder(disorder, L)
    return ChainSpec(Model.XXZ, L, delta=delta, fields=fields)


def _product_state(single: np.ndarray, L: int) -> np.ndarray:
    amp = single.copy()
    for _ in range(L - 1):
        amp = np.kron(amp, single)
    return amp


def make_initial_state(
    kind: InitialStateKind,
    L: int,
    seed=0,
    complex_amplitudes: bool = True,
    spec: Optional[ChainSpec] = None,
) -> StateVector:
    """Build one of the initial states used in the relaxation scenarios.

    RANDOM_GAUSSIAN draws i.i.d. standard-normal amplitudes (complex by
    default, real if ``complex_amplitudes`` is False) and normalizes.
    GROUND_STATE requires ``spec`` and diagonalizes the dense Hamiltonian.
    """
    if L < 1:
        raise DomainError("need at least 1 site")
    dim = 2**L
    up = np.array([1.0, 0.0], dtype=complex)
    down = np.array([0.0, 1.0], dtype=complex)
    if kind is InitialStateKind.RANDOM_GAUSSIAN:
        rng = np.random.default_rng(seed)
        amp = rng.standard_normal(dim).astype(complex)
        if complex_amplitudes:
            amp = amp + 1j * rng.standard_normal(dim)
        amp /= np.linalg.norm(amp)
    elif kind is InitialStateKind.X_PLUS:
        amp = _product_state((up + down) / np.sqrt(2), L)
    elif kind is InitialStateKind.Y_PLUS:
        amp = _product_state((up + 1j * down) / np.sqrt(2), L)
    elif kind is InitialStateKind.Z_PLUS:
        amp = _product_state(up, L)
    elif kind is InitialStateKind.NEEL:
        if L % 2:
            raise DomainError("the Neel state needs an even number of sites")
        amp = np.zeros(dim, dtype=complex)
        idx = 0
        for j in range(L):  # down spins on odd sites set bit (L-1-j)
            if j % 2:
                idx |= 1 << (L - 1 - j)
        amp[idx] = 1.0
    elif kind is InitialStateKind.GROUND_STATE:
        if spec is None:
            raise DomainError("GROUND_STATE needs a ChainSpec")
        H = build_hamiltonian(spec)
        _, vecs = np.linalg.eigh(H)
        amp = vecs[:, 0].astype(complex)
    else:  # pragma: no cover
        raise DomainError(f"unknown initial state kind {kind}")
    return StateVector(amp, L)


def total_sz(L: int) -> np.ndarray:
    """Dense sum of sigma^z over all sites (conserved by clean XXZ)."""
    return sum(_site_operator(SZ, j, L) for j in range(L))
