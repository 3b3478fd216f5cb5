"""Distances between quantum states and partial traces of pure states.

Implements the trace, Bures, Schatten-2, normalized Schatten-2 and relative
distances, plus the cyclic-block partial trace used throughout the package.
All trace norms and matrix functions go through Hermitized
eigendecompositions; see states.clipped_spectrum for the PSD clipping policy.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import DimensionMismatchError, DomainError
from .states import (
    DensityMatrix,
    MetricKind,
    StateVector,
    clipped_spectrum,
    hermitize,
)

#: eigenvalues of sigma above this count as support of sigma (relative entropy)
SUPPORT_CUTOFF = 1e-12
#: eigenvalues of rho above this must lie in the support of sigma
WEIGHT_CUTOFF = 1e-10


def _check_dims(rho: DensityMatrix, sigma: DensityMatrix) -> None:
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")


def partial_trace(psi: StateVector, first_site: int, length: int) -> DensityMatrix:
    """RDM of the cyclic contiguous block of ``length`` sites from ``first_site``.

    The subsystem wraps past site L-1 back to site 0 (ring geometry).
    """
    L = psi.num_sites
    if not 1 <= length <= L:
        raise DomainError(f"block length {length} outside [1, {L}]")
    if not 0 <= first_site < L:
        raise DomainError(f"first_site {first_site} outside [0, {L})")
    rho = _kernels.ptrace_outer(psi.amplitudes, psi.amplitudes, L, first_site, length)
    return DensityMatrix(hermitize(rho), length, validate=False)


def partial_trace_outer(
    psi: np.ndarray, phi: np.ndarray, num_sites: int, first_site: int, length: int
) -> np.ndarray:
    """tr over the block complement of |psi><phi| for raw amplitude vectors.

    Not Hermitian in general; used to assemble d(rho_A)/dt.
    """
    if not 1 <= length <= num_sites:
        raise DomainError(f"block length {length} outside [1, {num_sites}]")
    return _kernels.ptrace_outer(psi, phi, num_sites, first_site, length)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """(1/2) ||rho - sigma||_1 via the eigenvalues of the Hermitized difference."""
    _check_dims(rho, sigma)
    vals = np.linalg.eigvalsh(hermitize(rho.matrix - sigma.matrix))
    return 0.5 * float(np.abs(vals).sum())


def pure_trace_distance(psi: StateVector, phi: StateVector) -> float:
    """sqrt(1 - |<psi|phi>|^2), the trace distance between two pure states."""
    ov = psi.overlap(phi)
    return float(np.sqrt(max(0.0, 1.0 - abs(ov) ** 2)))


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0, 1].

    Evaluated as the nuclear norm ||sqrt(rho) sqrt(sigma)||_1 via SVD, which
    is symmetric by construction and stays accurate for rank-deficient
    states (no matrix square root of a nearly singular product).
    """
    _check_dims(rho, sigma)
    p, u = clipped_spectrum(rho.matrix)
    q, v = clipped_spectrum(sigma.matrix)
    m = (u * np.sqrt(p)).conj().T @ (v * np.sqrt(q))
    return float(min(1.0, np.linalg.svd(m, compute_uv=False).sum()))


def bures_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """sqrt(2 [1 - F(rho, sigma)]), in [0, sqrt(2)]."""
    return float(np.sqrt(max(0.0, 2.0 * (1.0 - fidelity(rho, sigma)))))


def schatten2_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Frobenius (Schatten-2) distance sqrt((1/2) tr[(rho-sigma)^2])."""
    _check_dims(rho, sigma)
    diff = rho.matrix - sigma.matrix
    return float(np.sqrt(0.5 * np.sum(np.abs(diff) ** 2)))


def normalized_schatten2_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """sqrt(tr[(rho-sigma)^2] / (tr rho^2 + tr sigma^2)), in [0, 1]."""
    _check_dims(rho, sigma)
    diff = np.sum(np.abs(rho.matrix - sigma.matrix) ** 2)
    purities = np.sum(np.abs(rho.matrix) ** 2) + np.sum(np.abs(sigma.matrix) ** 2)
    return float(np.sqrt(diff / purities))


def relative_entropy(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    support_cutoff: float = SUPPORT_CUTOFF,
    weight_cutoff: float = WEIGHT_CUTOFF,
) -> float:
    """Quantum relative entropy S(rho || sigma) = tr rho log rho - tr rho log sigma.

    Returns +inf when rho has weight outside the support of sigma: any
    eigenvector of rho with eigenvalue > weight_cutoff carrying more than
    weight_cutoff outside {eigenvalues of sigma > support_cutoff}.
    The cutoffs are exposed because the choice is not dictated by physics.
    """
    _check_dims(rho, sigma)
    p, u = clipped_spectrum(rho.matrix)
    q, v = clipped_spectrum(sigma.matrix)

    overlaps = np.abs(v.conj().T @ u) ** 2  # overlaps[j, i] = |<v_j|u_i>|^2
    outside = q <= support_cutoff
    if np.any(outside):
        bad_weight = overlaps[outside][:, p > weight_cutoff].sum(axis=0)
        if bad_weight.size and bad_weight.max() > weight_cutoff:
            return float("inf")

    psup = p > 0.0
    ent = float(np.sum(p[psup] * np.log(p[psup])))
    inside = ~outside
    cross = float((p[None, :] * overlaps)[inside].sum(axis=1) @ np.log(q[inside]))
    return ent - cross


def relative_distance(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    support_cutoff: float = SUPPORT_CUTOFF,
    weight_cutoff: float = WEIGHT_CUTOFF,
) -> float:
    """sqrt(S(rho || sigma) / 2); upper-bounds the trace distance (Pinsker)."""
    s = relative_entropy(rho, sigma, support_cutoff, weight_cutoff)
    if np.isinf(s):
        return float("inf")
    return float(np.sqrt(max(0.0, s) / 2.0))


_DISPATCH = {
    MetricKind.TRACE_DISTANCE: trace_distance,
    MetricKind.BURES: bures_distance,
    MetricKind.SCHATTEN2: schatten2_distance,
    MetricKind.NORMALIZED_SCHATTEN2: normalized_schatten2_distance,
    MetricKind.RELATIVE_DISTANCE: relative_distance,
}


def state_distance(rho: DensityMatrix, sigma: DensityMatrix, kind: MetricKind) -> float:
    """Evaluate one of the supported distances between two density matrices."""
    return _DISPATCH[kind](rho, sigma)
