"""State containers and the metric enumeration.

Basis convention (used everywhere in the package): site 0 is the most
significant bit of the computational-basis index, and spin-up maps to bit 0.
So for L=2 the basis order is |up,up>, |up,down>, |down,up>, |down,down>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError, StateValidityError

NORM_TOL = 1e-12
HERM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_CLIP = -1e-10   # eigenvalues above this are treated as roundoff and clipped
PSD_HARD = -1e-8    # below this the state is genuinely invalid


class MetricKind(Enum):
    """Distance functionals between density matrices."""

    TRACE_DISTANCE = "trace"
    BURES = "bures"
    SCHATTEN2 = "schatten2"
    NORMALIZED_SCHATTEN2 = "nschatten2"
    RELATIVE_DISTANCE = "relative"


@dataclass(frozen=True)
class StateVector:
    """Pure state of ``num_sites`` spin-1/2 sites as a unit-norm amplitude vector."""

    amplitudes: np.ndarray
    num_sites: int

    def __post_init__(self):
        amp = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amp)
        if self.num_sites < 1:
            raise StateValidityError(f"num_sites must be >= 1, got {self.num_sites}")
        if amp.shape != (2**self.num_sites,):
            raise StateValidityError(
                f"amplitude vector has length {amp.shape}, expected 2^{self.num_sites}"
            )
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > 1e-10:
            raise StateValidityError(f"state norm {norm} deviates from 1")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def overlap(self, other: "StateVector") -> complex:
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.dim} vs {other.dim}"
            )
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, PSD operator on a block of ``num_sites`` sites."""

    matrix: np.ndarray
    num_sites: int
    validate: bool = field(default=True, compare=False)

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", mat)
        d = 2**self.num_sites
        if mat.shape != (d, d):
            raise StateValidityError(
                f"matrix shape {mat.shape} does not match 2^{self.num_sites}"
            )
        if self.validate:
            herm_defect = np.max(np.abs(mat - mat.conj().T))
            if herm_defect > 1e-10:
                raise StateValidityError(f"Hermiticity defect {herm_defect}")
            tr = np.trace(mat).real
            if abs(tr - 1.0) > 1e-10:
                raise StateValidityError(f"trace {tr} deviates from 1")
            lam_min = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2).min())
            if lam_min < PSD_HARD:
                raise StateValidityError(f"smallest eigenvalue {lam_min} below {PSD_HARD}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def hermitize(mat: np.ndarray) -> np.ndarray:
    """(M + M†)/2 — applied before every eigendecomposition to kill drift."""
    return (mat + mat.conj().T) / 2


def clipped_spectrum(mat: np.ndarray, hard: float = PSD_HARD, clip: float = PSD_CLIP):
    """Eigendecomposition with roundoff-negative eigenvalues clipped to zero.

    Raises StateValidityError when an eigenvalue falls below ``hard``.
    """
    vals, vecs = np.linalg.eigh(hermitize(mat))
    if vals.min() < hard:
        raise StateValidityError(f"eigenvalue {vals.min()} below hard floor {hard}")
    vals = np.where(vals < 0.0, 0.0, vals)
    return vals, vecs


def pure_density(psi: StateVector) -> DensityMatrix:
    """|psi><psi| as a DensityMatrix on the full system."""
    mat = np.outer(psi.amplitudes, psi.amplitudes.conj())
    return DensityMatrix(mat, psi.num_sites, validate=False)
