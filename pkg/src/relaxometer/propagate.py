"""Exact-diagonalization time evolution and evolution-speed estimators.

The total-system speed equals the energy fluctuation Delta H; subsystem
speeds are bounded by it.  The exact-derivative estimator builds
d(rho_A)/dt = tr_complement(-i [H, |psi><psi|]) and takes half its trace
norm; the finite-difference estimator works for any metric.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from . import qmetric
from .errors import DomainError
from .spinchain import ChainSpec
from .states import DensityMatrix, MetricKind, StateVector, hermitize

DEFAULT_DT = 1e-4
DEFAULT_WINDOW_SAMPLES = 200


class SpeedMethod(Enum):
    FINITE_DIFFERENCE = "fd"
    EXACT_DERIVATIVE = "exact"


@dataclass(frozen=True)
class SpeedEstimate:
    value: float
    method: SpeedMethod
    time: float
    dt: Optional[float] = None


@dataclass(frozen=True)
class EigenBasis:
    """Full spectral decomposition H = V diag(E) V^dagger, eigenvalues ascending.

    Immutable; share freely across workers.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: Optional[ChainSpec] = None

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def diagonalize(H: np.ndarray, source: Optional[ChainSpec] = None) -> EigenBasis:
    """Spectral decomposition of a Hermitian matrix."""
    defect = np.max(np.abs(H - H.conj().T))
    if defect > 1e-10:
        raise DomainError(f"matrix is not Hermitian (defect {defect})")
    H = hermitize(H)
    if np.iscomplexobj(H) and np.max(np.abs(H.imag)) == 0.0:
        H = H.real  # real-symmetric solver is noticeably faster at L=12
    vals, vecs = np.linalg.eigh(H)
    return EigenBasis(vals, vecs, source)


def evolve(basis: EigenBasis, psi0: StateVector, t: float) -> StateVector:
    """|psi(t)> = V exp(-i E t) V^dagger |psi0>."""
    if basis.dim != psi0.dim:
        raise DomainError(f"dimension mismatch: {basis.dim} vs {psi0.dim}")
    V = basis.eigenvectors
    coeff = _matvec(V.conj().T if np.iscomplexobj(V) else V.T, psi0.amplitudes)
    amp = _matvec(V, np.exp(-1j * basis.eigenvalues * t) * coeff)
    amp = amp / np.linalg.norm(amp)
    return StateVector(amp, psi0.num_sites)


def _matvec(M: np.ndarray, x: np.ndarray) -> np.ndarray:
    """M @ x, splitting complex x over real M (avoids upcasting M)."""
    if not np.iscomplexobj(M) and np.iscomplexobj(x):
        return M @ x.real + 1j * (M @ x.imag)
    return M @ x


def energy_fluctuation(H: np.ndarray, psi: StateVector) -> float:
    """sqrt(<H^2> - <H>^2); the total-system evolution speed."""
    if H.shape[0] != psi.dim:
        raise DomainError(f"dimension mismatch: {H.shape[0]} vs {psi.dim}")
    hpsi = H @ psi.amplitudes
    mean = np.vdot(psi.amplitudes, hpsi).real
    # ||(H - <H>) psi|| avoids the <H^2> - <H>^2 cancellation near eigenstates
    return float(np.linalg.norm(hpsi - mean * psi.amplitudes))


def subsystem_speed_fd(
    basis: EigenBasis,
    psi_t: StateVector,
    first_site: int,
    length: int,
    dt: float = DEFAULT_DT,
    metric: MetricKind = MetricKind.TRACE_DISTANCE,
    time: float = 0.0,
) -> SpeedEstimate:
    """Finite-difference speed: metric(rho_A(t), rho_A(t+dt)) / dt."""
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    rho_now = qmetric.partial_trace(psi_t, first_site, length)
    rho_next = qmetric.partial_trace(evolve(basis, psi_t, dt), first_site, length)
    value = qmetric.state_distance(rho_now, rho_next, metric) / dt
    return SpeedEstimate(value, SpeedMethod.FINITE_DIFFERENCE, time, dt)


def rdm_time_derivative(
    H: np.ndarray, psi_t: StateVector, first_site: int, length: int
) -> np.ndarray:
    """d(rho_A)/dt = tr_complement(-i [H, |psi><psi|]), a traceless Hermitian matrix."""
    hpsi = H @ psi_t.amplitudes
    cross = qmetric.partial_trace_outer(
        hpsi, psi_t.amplitudes, psi_t.num_sites, first_site, length
    )
    return -1j * (cross - cross.conj().T)


def subsystem_speed_exact(
    H: np.ndarray,
    psi_t: StateVector,
    first_site: int,
    length: int,
    time: float = 0.0,
) -> SpeedEstimate:
    """v_A = (1/2) || d(rho_A)/dt ||_1 (trace-distance speed, no dt artifact)."""
    drho = rdm_time_derivative(H, psi_t, first_site, length)
    vals = np.linalg.eigvalsh(drho)
    return SpeedEstimate(0.5 * float(np.abs(vals).sum()), SpeedMethod.EXACT_DERIVATIVE, time)


def time_grid(t_a: float, t_b: float, samples: int = DEFAULT_WINDOW_SAMPLES) -> np.ndarray:
    """Uniform grid over [t_a, t_b] including both endpoints."""
    if t_b <= t_a:
        raise DomainError(f"window [{t_a}, {t_b}] is empty")
    if samples < 2:
        raise DomainError("need at least 2 samples")
    return np.linspace(t_a, t_b, samples)


def time_average(
    f: Callable[[float], float],
    window: tuple[float, float],
    samples: int = DEFAULT_WINDOW_SAMPLES,
) -> float:
    """Uniform-grid mean of f over the window, endpoints included."""
    grid = time_grid(window[0], window[1], samples)
    return float(np.mean([f(t) for t in grid]))
