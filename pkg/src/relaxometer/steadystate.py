"""Reference steady states and the distance-to-steady-state series.

Supported references: the maximally mixed state, canonical Gibbs states
(fixed beta or energy-matched by bisection), the diagonal (dephased)
ensemble, and the elementwise time-averaged RDM.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import qmetric
from .errors import DomainError, NoSolutionError
from .propagate import EigenBasis, evolve, time_grid
from .states import DensityMatrix, MetricKind, StateVector, hermitize

log = logging.getLogger(__name__)

#: energy gaps below this merge eigenstates into one degenerate level
DEGENERACY_GAP = 1e-10
ENERGY_TOL = 1e-10


class SteadyStateKind(Enum):
    MAXIMALLY_MIXED = "maximally_mixed"
    GIBBS = "gibbs"
    GIBBS_ENERGY_MATCHED = "gibbs_energy_matched"
    DIAGONAL_ENSEMBLE = "diagonal_ensemble"
    TIME_AVERAGED_RDM = "time_averaged_rdm"


@dataclass(frozen=True)
class SteadyStateSpec:
    kind: SteadyStateKind
    beta: float = 0.0
    window: Optional[tuple[float, float]] = None
    window_samples: int = 200

    def __post_init__(self):
        if self.kind is SteadyStateKind.GIBBS and not np.isfinite(self.beta):
            raise DomainError("Gibbs beta must be finite")
        if self.kind is SteadyStateKind.TIME_AVERAGED_RDM:
            if self.window is None or self.window[1] <= self.window[0]:
                raise DomainError("TIME_AVERAGED_RDM needs a valid window")


def thermal_energy(eigenvalues: np.ndarray, beta: float) -> float:
    """tr(H e^{-beta H}) / Z, evaluated with a spectrum shift for stability."""
    e = eigenvalues - (eigenvalues.min() if beta >= 0 else eigenvalues.max())
    w = np.exp(-beta * e)
    return float((eigenvalues * w).sum() / w.sum())


def match_beta(eigenvalues: np.ndarray, target_energy: float, tol: float = ENERGY_TOL) -> float:
    """Solve tr(H e^{-bH})/Z = target for b by bisection.

    Thermal energy is strictly decreasing in beta, so bisection converges;
    the target must lie strictly inside (E_min, E_max).
    """
    e_min, e_max = float(eigenvalues.min()), float(eigenvalues.max())
    if not e_min < target_energy < e_max:
        raise NoSolutionError(
            f"target energy {target_energy} outside spectrum ({e_min}, {e_max})"
        )
    lo, hi = -1.0, 1.0  # expand until the target is bracketed
    while thermal_energy(eigenvalues, lo) < target_energy:
        lo *= 2.0
        if lo < -1e8:
            raise NoSolutionError("beta bracket expansion failed (low side)")
    while thermal_energy(eigenvalues, hi) > target_energy:
        hi *= 2.0
        if hi > 1e8:
            raise NoSolutionError("beta bracket expansion failed (high side)")
    while hi - lo > 1e-14 * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if abs(thermal_energy(eigenvalues, mid) - target_energy) < tol:
            return mid
        if thermal_energy(eigenvalues, mid) > target_energy:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _weighted_rdm(
    basis: EigenBasis,
    weights: np.ndarray,
    L: int,
    first_site: int,
    length: int,
) -> DensityMatrix:
    """sum_n w_n tr_complement |E_n><E_n| for nonneg weights summing to 1."""
    keep = weights > 1e-16
    acc = np.zeros((2**length, 2**length), dtype=complex)
    for n in np.nonzero(keep)[0]:
        vec = basis.eigenvectors[:, n].astype(complex)
        acc += weights[n] * qmetric.partial_trace_outer(vec, vec, L, first_site, length)
    return DensityMatrix(hermitize(acc), length, validate=False)


def degenerate_blocks(eigenvalues: np.ndarray, gap: float = DEGENERACY_GAP):
    """Partition eigenlevel indices into clusters separated by < gap."""
    blocks = []
    start = 0
    for n in range(1, len(eigenvalues) + 1):
        if n == len(eigenvalues) or eigenvalues[n] - eigenvalues[n - 1] >= gap:
            blocks.append(range(start, n))
            start = n
    return blocks


def steady_rdm(
    spec: SteadyStateSpec,
    basis: EigenBasis,
    psi0: StateVector,
    first_site: int,
    length: int,
) -> DensityMatrix:
    """Reference RDM of the chosen steady-state ensemble on the given block."""
    L = psi0.num_sites
    dim_a = 2**length
    if spec.kind is SteadyStateKind.MAXIMALLY_MIXED:
        return DensityMatrix(np.eye(dim_a) / dim_a, length, validate=False)

    if spec.kind in (SteadyStateKind.GIBBS, SteadyStateKind.GIBBS_ENERGY_MATCHED):
        if spec.kind is SteadyStateKind.GIBBS:
            beta = spec.beta
        else:
            target = float(
                np.vdot(psi0.amplitudes, basis.eigenvectors
                        @ (basis.eigenvalues * (basis.eigenvectors.conj().T
                                                @ psi0.amplitudes))).real
            )
            beta = match_beta(basis.eigenvalues, target)
        e = basis.eigenvalues - (basis.eigenvalues.min() if beta >= 0
                                 else basis.eigenvalues.max())
        w = np.exp(-beta * e)
        return _weighted_rdm(basis, w / w.sum(), L, first_site, length)

    if spec.kind is SteadyStateKind.DIAGONAL_ENSEMBLE:
        coeff = basis.eigenvectors.conj().T @ psi0.amplitudes
        blocks = degenerate_blocks(basis.eigenvalues)
        if len(blocks) < basis.dim:
            log.info("diagonal ensemble: merged %d levels into %d degenerate blocks",
                     basis.dim, len(blocks))
        acc = np.zeros((dim_a, dim_a), dtype=complex)
        for block in blocks:
            # projection of psi0 onto the degenerate subspace, kept coherent
            sub = basis.eigenvectors[:, block] @ coeff[list(block)]
            w = np.vdot(sub, sub).real
            if w > 1e-16:
                acc += qmetric.partial_trace_outer(sub, sub, L, first_site, length)
        return DensityMatrix(hermitize(acc), length, validate=False)

    if spec.kind is SteadyStateKind.TIME_AVERAGED_RDM:
        grid = time_grid(spec.window[0], spec.window[1], spec.window_samples)
        acc = np.zeros((dim_a, dim_a), dtype=complex)
        for t in grid:
            psi_t = evolve(basis, psi0, t)
            acc += qmetric.partial_trace(psi_t, first_site, length).matrix
        return DensityMatrix(hermitize(acc / len(grid)), length, validate=False)

    raise DomainError(f"unknown steady state kind {spec.kind}")  # pragma: no cover


def total_steady_distance(
    spec: SteadyStateSpec,
    basis: EigenBasis,
    psi0: StateVector,
) -> float:
    """D(|psi(t)>, rho_ss) for the full system.

    Constant in time whenever rho_ss commutes with H (all supported kinds are
    functions of H and the diagonal-ensemble weights), so it is evaluated once
    at t = 0.
    """
    dim = psi0.dim
    if spec.kind is SteadyStateKind.MAXIMALLY_MIXED:
        return 1.0 - 1.0 / dim
    rho_ss = steady_rdm(spec, basis, psi0, 0, psi0.num_sites)
    mat = np.outer(psi0.amplitudes, psi0.amplitudes.conj()) - rho_ss.matrix
    vals = np.linalg.eigvalsh(hermitize(mat))
    return 0.5 * float(np.abs(vals).sum())


def steady_distance_series(
    basis: EigenBasis,
    psi0: StateVector,
    spec: SteadyStateSpec,
    first_site: int,
    length: int,
    times: np.ndarray,
    metric: MetricKind = MetricKind.TRACE_DISTANCE,
) -> dict:
    """Per-time distance of rho_A(t) to the fixed reference RDM.

    Returns {"times", "subsystem", "total"}; "total" is the (constant)
    full-system distance to the reference ensemble.
    """
    reference = steady_rdm(spec, basis, psi0, first_site, length)
    series = np.empty(len(times))
    for i, t in enumerate(times):
        psi_t = evolve(basis, psi0, t)
        rho_t = qmetric.partial_trace(psi_t, first_site, length)
        series[i] = qmetric.state_distance(rho_t, reference, metric)
    return {
        "times": np.asarray(times, dtype=float),
        "subsystem": series,
        "total": total_steady_distance(spec, basis, psi0),
    }
