"""TFIM quench dynamics via fermionic Gaussian states (Majorana covariances).

The TFIM chain H(h) = -(1/2) sum_j (sx_j sx_{j+1} + h sz_j) maps under
Jordan-Wigner to a quadratic fermion Hamiltonian; in the even-parity sector
(which contains the ground state for h > 0 used here) the boundary condition
is antiperiodic.  Every state handled in this module is Gaussian, fully
described by the real antisymmetric covariance matrix

    Gamma_{mu nu} = (i/2) <[m_mu, m_nu]>,

with Majorana ordering m_{2j} = a_j, m_{2j+1} = b_j per site.  Distances are
computed directly from covariances; dense ED at small L is the correctness
oracle (see tests), since sign conventions in this mapping are easy to get
wrong on paper.

Identities used below (n = number of modes, X_i = i Gamma_i Hermitian):

* tr(rho1 rho2) = 2^-n sqrt(det(I - Gamma1 Gamma2))
* purity tr(rho^2) = 2^-n sqrt(det(I + Gamma^2))
* fidelity F = det(I + M^(1/2))^(1/2) / [det(I+T1) det(I+T2)]^(1/4) with
  T_i = (I+X_i)(I-X_i)^(-1) and M = T1^(1/2) T2 T1^(1/2); evaluated through
  the generalized eigenproblem (I+X1)(I+X2) v = mu (I-X1)(I-X2) v so that
  near-pure states stay numerically tame.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import DomainError, UnsupportedMetricError
from .states import DensityMatrix, MetricKind, hermitize

#: singular values of covariances are clipped to 1 - PURITY_EPS before any
#: formula that diverges for pure states; flagged in docstrings and README
PURITY_EPS = 1e-12

#: dense reconstruction guard (2^n storage)
RECONSTRUCT_GUARD = 12


@dataclass(frozen=True)
class MajoranaCovariance:
    """Real antisymmetric 2n x 2n covariance of a fermionic Gaussian state."""

    gamma: np.ndarray
    num_modes: int

    def __post_init__(self):
        g = np.ascontiguousarray(self.gamma, dtype=float)
        object.__setattr__(self, "gamma", g)
        n = self.num_modes
        if g.shape != (2 * n, 2 * n):
            raise DomainError(f"covariance shape {g.shape}, expected {(2*n, 2*n)}")
        if np.max(np.abs(g + g.T)) > 1e-8:
            raise DomainError("covariance is not antisymmetric")
        smax = np.linalg.norm(g, 2)
        if smax > 1 + 1e-7:
            raise DomainError(f"covariance singular value {smax} exceeds 1")


@dataclass(frozen=True)
class QuenchSpec:
    """Global quench h0 -> h1 of the transverse field on L (even) sites."""

    h0: float
    h1: float
    num_sites: int

    def __post_init__(self):
        if self.num_sites % 2 or self.num_sites < 2:
            raise DomainError("quench dynamics needs an even number of sites")


def coupling_matrix(h: float, L: int) -> np.ndarray:
    """Real antisymmetric A with H = (i/4) m^T A m (antiperiodic sector)."""
    A = np.zeros((2 * L, 2 * L))
    for j in range(L - 1):
        A[2 * j + 1, 2 * j + 2] = 1.0  # hopping b_j a_{j+1}
    A[2 * L - 1, 0] = -1.0  # antiperiodic boundary
    for j in range(L):
        A[2 * j, 2 * j + 1] += h  # field a_j b_j
    return A - A.T


def canonical_form(A: np.ndarray, tol: float = 1e-8):
    """Block-diagonalize a real antisymmetric matrix.

    Returns (O, eps) with A = O blockdiag([[0, eps_m], [-eps_m, 0]]) O^T,
    O orthogonal and eps_m >= 0.
    """
    T, O = scipy.linalg.schur(np.asarray(A, dtype=float), output="real")
    n2 = A.shape[0]
    off = T.copy()
    for i in range(0, n2 - 1, 2):
        off[i : i + 2, i : i + 2] = 0.0
    if np.max(np.abs(off)) > tol * max(1.0, np.max(np.abs(T))):
        raise DomainError("Schur form is not block diagonal; matrix not antisymmetric?")
    eps = np.empty(n2 // 2)
    O = O.copy()
    for m in range(n2 // 2):
        e = T[2 * m, 2 * m + 1]
        if e < 0:  # swap the block's basis pair to make the block [[0, e], [-e, 0]]
            O[:, [2 * m, 2 * m + 1]] = O[:, [2 * m + 1, 2 * m]]
            e = -e
        eps[m] = e
    return O, eps


def _blockdiag(values: np.ndarray) -> np.ndarray:
    """blockdiag([[0, v_m], [-v_m, 0]])."""
    B = np.zeros((2 * len(values), 2 * len(values)))
    for m, v in enumerate(values):
        B[2 * m, 2 * m + 1] = v
        B[2 * m + 1, 2 * m] = -v
    return B


def ground_covariance(h: float, L: int) -> MajoranaCovariance:
    """Covariance of the TFIM ground state (antiperiodic/even sector)."""
    if L % 2 or L < 2:
        raise DomainError("need an even number of sites")
    O, _ = canonical_form(coupling_matrix(h, L))
    gamma = O @ _blockdiag(-np.ones(L)) @ O.T
    return MajoranaCovariance((gamma - gamma.T) / 2, L)


@lru_cache(maxsize=16)
def _quench_cache(q: QuenchSpec):
    gamma0 = ground_covariance(q.h0, q.num_sites).gamma
    O1, eps1 = canonical_form(coupling_matrix(q.h1, q.num_sites))
    return gamma0, O1, eps1


def quench_covariance(q: QuenchSpec, t: float) -> MajoranaCovariance:
    """Covariance at time t after the quench h0 -> h1."""
    gamma0, O1, eps1 = _quench_cache(q)
    c, s = np.cos(eps1 * t), np.sin(eps1 * t)
    # R = exp(A1 t) assembled from the canonical rotation blocks
    rot = np.zeros_like(gamma0)
    for m in range(q.num_sites):
        rot[2 * m, 2 * m] = rot[2 * m + 1, 2 * m + 1] = c[m]
        rot[2 * m, 2 * m + 1] = s[m]
        rot[2 * m + 1, 2 * m] = -s[m]
    R = O1 @ rot @ O1.T
    gamma = R @ gamma0 @ R.T
    return MajoranaCovariance((gamma - gamma.T) / 2, q.num_sites)


def gge_covariance(q: QuenchSpec) -> MajoranaCovariance:
    """Infinite-time (dephased) covariance in the post-quench eigenbasis.

    Keeps one conserved mode occupation per post-quench Bogoliubov mode and
    zeroes all coherences; equals the long-window time average of
    quench_covariance up to quadrature error.
    """
    gamma0 = ground_covariance(q.h0, q.num_sites).gamma
    O1, _ = canonical_form(coupling_matrix(q.h1, q.num_sites))
    g = O1.T @ gamma0 @ O1
    occ = np.array([(g[2 * m, 2 * m + 1] - g[2 * m + 1, 2 * m]) / 2
                    for m in range(q.num_sites)])
    gamma = O1 @ _blockdiag(occ) @ O1.T
    return MajoranaCovariance((gamma - gamma.T) / 2, q.num_sites)


def block_covariance(cov: MajoranaCovariance, first_site: int, length: int) -> MajoranaCovariance:
    """Covariance of a contiguous, non-wrapping block of sites.

    Jordan-Wigner strings cancel only inside an unbroken run of sites, so
    blocks crossing the seam are rejected.  The quench states handled here
    are translation invariant, which makes every position equivalent anyway.
    """
    n = cov.num_modes
    if not 1 <= length <= n:
        raise DomainError(f"block length {length} outside [1, {n}]")
    if not 0 <= first_site < n:
        raise DomainError(f"first_site {first_site} outside [0, {n})")
    if first_site + length > n:
        raise DomainError("blocks wrapping past the last site are not supported here")
    idx = []
    for k in range(length):
        j = first_site + k
        idx.extend((2 * j, 2 * j + 1))
    sub = cov.gamma[np.ix_(idx, idx)]
    return MajoranaCovariance(sub, length)


def _clipped_hermitian(gamma: np.ndarray, eps: float = PURITY_EPS):
    """X = i Gamma with eigenvalues clipped into [-(1-eps), 1-eps]."""
    X = hermitize(1j * np.asarray(gamma, dtype=complex))
    vals, vecs = np.linalg.eigh(X)
    vals = np.clip(vals, -(1 - eps), 1 - eps)
    return (vecs * vals) @ vecs.conj().T, vals


def log_purity(cov: MajoranaCovariance) -> float:
    """log tr(rho^2) from the covariance."""
    n = cov.num_modes
    sign, logdet = np.linalg.slogdet(np.eye(2 * n) - cov.gamma @ cov.gamma)
    return -n * np.log(2.0) + 0.5 * logdet


def _log_overlap(c1: MajoranaCovariance, c2: MajoranaCovariance) -> float:
    """log tr(rho1 rho2); -inf for orthogonal states."""
    n = c1.num_modes
    m = np.eye(2 * n) - c1.gamma @ c2.gamma
    sign, logdet = np.linalg.slogdet(m)
    if sign <= 0:
        return -np.inf
    return -n * np.log(2.0) + 0.5 * logdet


def gaussian_fidelity(c1: MajoranaCovariance, c2: MajoranaCovariance) -> float:
    """Uhlmann fidelity between two fermionic Gaussian states.

    Uses F = sqrt(tr rho1 rho2) * prod_k (1 + sqrt(tau_k)) / sqrt(1 + tau_k)
    over the eigenvalue pairs (tau, 1/tau) of T1 T2, T = (I+X)(I-X)^{-1},
    X = i Gamma.  The product factors lie in [1, sqrt(2)] and tend to 1 for
    pure directions, so the formula stays conditioned for near-pure states;
    tau is obtained from the pencil (I+X1)(I+X2) - mu (I-X1)(I-X2), whose
    matrices are bounded, via QZ.  The dense cross-check at small L in the
    test suite is the normative definition.
    """
    if c1.num_modes != c2.num_modes:
        raise DomainError("mode count mismatch")
    n = c1.num_modes
    s, logdet = np.linalg.slogdet(np.eye(2 * n) - c1.gamma @ c2.gamma)
    if s <= 0:  # orthogonal supports up to roundoff
        return 0.0
    log_overlap = -n * np.log(2.0) + 0.5 * logdet
    X1 = hermitize(1j * np.asarray(c1.gamma, dtype=complex))
    X2 = hermitize(1j * np.asarray(c2.gamma, dtype=complex))
    eye = np.eye(2 * n)
    A = (eye + X1) @ (eye + X2)
    B = (eye - X1) @ (eye - X2)
    ab, _ = scipy.linalg.eig(A, B, homogeneous_eigvals=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_tau = np.log(np.abs(ab[0])) - np.log(np.abs(ab[1]))
    # |log tau| is symmetric under tau -> 1/tau, so the pair product equals
    # the product over all 2n eigenvalues at half weight; indeterminate 0/0
    # eigenvalues (shared exactly-pure directions) contribute the tau -> inf
    # limit f = 1 and are skipped.
    log_tau = log_tau[np.isfinite(log_tau)]
    s_abs = np.abs(log_tau)
    log_f_factors = np.log1p(np.exp(-s_abs / 2.0)) - 0.5 * np.log1p(np.exp(-s_abs))
    log_f = 0.5 * log_overlap + 0.5 * float(np.sum(log_f_factors))
    return float(np.exp(min(log_f, 0.0)))


def gaussian_relative_entropy(c1: MajoranaCovariance, c2: MajoranaCovariance) -> float:
    """S(rho1 || rho2) from covariances (clipped near pure directions)."""
    if c1.num_modes != c2.num_modes:
        raise DomainError("mode count mismatch")
    O1, g1 = canonical_form(c1.gamma)
    O2, g2 = canonical_form(c2.gamma)
    g1c = np.clip(g1, 0.0, 1 - PURITY_EPS)
    g2c = np.clip(g2, 0.0, 1 - PURITY_EPS)
    p = (1 + g1c) / 2
    ent = float(np.sum(p * np.log(p) + (1 - p) * np.log(1 - p)))
    W2 = O2 @ _blockdiag(2 * np.arctanh(g2c)) @ O2.T
    # tr rho1 log rho2 = -(1/4) tr(W2 Gamma1) - log Z2, and
    # (1/4) tr(W2 Gamma1) = -(1/4) sum_elementwise(W2 * Gamma1)
    cross = 0.25 * float(np.sum(W2 * c1.gamma))
    log_z2 = float(np.sum(np.log(2.0) - 0.5 * np.log1p(-g2c**2)))
    return ent - cross + log_z2


def gaussian_metric(
    c1: MajoranaCovariance, c2: MajoranaCovariance, metric: MetricKind
) -> float:
    """Distance between two Gaussian states computed from covariances.

    TraceDistance has no efficient Gaussian form and is rejected; use Bures.
    """
    if c1.num_modes != c2.num_modes:
        raise DomainError("mode count mismatch")
    if metric is MetricKind.TRACE_DISTANCE:
        raise UnsupportedMetricError(
            "trace distance has no efficient Gaussian form; use Bures"
        )
    if metric is MetricKind.BURES:
        return float(np.sqrt(max(0.0, 2.0 * (1.0 - gaussian_fidelity(c1, c2)))))
    if metric in (MetricKind.SCHATTEN2, MetricKind.NORMALIZED_SCHATTEN2):
        p1 = np.exp(log_purity(c1))
        p2 = np.exp(log_purity(c2))
        lov = _log_overlap(c1, c2)
        cross = 0.0 if lov == -np.inf else np.exp(lov)
        sq = max(0.0, p1 + p2 - 2.0 * cross)
        if metric is MetricKind.SCHATTEN2:
            return float(np.sqrt(sq / 2.0))
        return float(np.sqrt(sq / (p1 + p2)))
    if metric is MetricKind.RELATIVE_DISTANCE:
        s = gaussian_relative_entropy(c1, c2)
        return float(np.sqrt(max(0.0, s) / 2.0))
    raise UnsupportedMetricError(f"unsupported metric {metric}")  # pragma: no cover


def gaussian_speed_fd(
    q: QuenchSpec,
    t: float,
    first_site: int,
    length: int,
    metric: MetricKind = MetricKind.BURES,
    dt: float = 1e-4,
) -> float:
    """Finite-difference subsystem speed after the quench."""
    if dt <= 0:
        raise DomainError("dt must be positive")
    b_now = block_covariance(quench_covariance(q, t), first_site, length)
    b_next = block_covariance(quench_covariance(q, t + dt), first_site, length)
    return gaussian_metric(b_now, b_next, metric) / dt


def covariance_energy(cov: MajoranaCovariance, h: float) -> float:
    """<H(h)> of the Gaussian state: -(1/4) tr(A Gamma)."""
    A = coupling_matrix(h, cov.num_modes)
    return -0.25 * float(np.sum(A * cov.gamma.T))


def covariance_energy_fluctuation(cov: MajoranaCovariance, h: float) -> float:
    """DeltaH of H(h) in the Gaussian state, by Wick contraction.

    With C = <m m> = I - i Gamma and H = (i/4) m^T A m,
    Var H = (1/16) [sum A_mn A_rs (C_mr C_ns - C_ms C_nr)].
    """
    n = cov.num_modes
    A = coupling_matrix(h, n)
    C = np.eye(2 * n) - 1j * cov.gamma
    t1 = np.einsum("mn,rs,mr,ns->", A, A, C, C, optimize=True)
    t2 = np.einsum("mn,rs,ms,nr->", A, A, C, C, optimize=True)
    var = float(((t1 - t2) / 16.0).real)
    return float(np.sqrt(max(var, 0.0)))


def _majorana_operators(n: int) -> list[np.ndarray]:
    """Dense block-local Majorana matrices (JW string within the block)."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    ops = []
    for j in range(n):
        string = [sz] * j
        a_fac = string + [sx] + [np.eye(2, dtype=complex)] * (n - j - 1)
        b_fac = string + [sy] + [np.eye(2, dtype=complex)] * (n - j - 1)
        a = a_fac[0]
        b = b_fac[0]
        for f_a, f_b in zip(a_fac[1:], b_fac[1:]):
            a = np.kron(a, f_a)
            b = np.kron(b, f_b)
        ops.extend((a, b))
    return ops


def covariance_to_density_matrix(cov: MajoranaCovariance) -> DensityMatrix:
    """Dense 2^n reconstruction of the Gaussian state (small n cross-checks)."""
    n = cov.num_modes
    if n > RECONSTRUCT_GUARD:
        raise DomainError(f"dense reconstruction capped at {RECONSTRUCT_GUARD} modes")
    O, g = canonical_form(cov.gamma)
    gc = np.clip(g, 0.0, 1 - PURITY_EPS)
    W = O @ _blockdiag(2 * np.arctanh(gc)) @ O.T
    m_ops = _majorana_operators(n)
    quad = np.zeros((2**n, 2**n), dtype=complex)
    for mu in range(2 * n):
        for nu in range(2 * n):
            if W[mu, nu] != 0.0:
                quad += 0.25j * W[mu, nu] * (m_ops[mu] @ m_ops[nu])
    rho = scipy.linalg.expm(hermitize(quad))
    rho = rho / np.trace(rho).real
    return DensityMatrix(hermitize(rho), n, validate=False)


def covariance_from_state(amplitudes: np.ndarray, n: int) -> MajoranaCovariance:
    """Covariance of an arbitrary dense state (oracle helper, small n)."""
    if n > RECONSTRUCT_GUARD:
        raise DomainError(f"dense covariance capped at {RECONSTRUCT_GUARD} modes")
    m_ops = _majorana_operators(n)
    gamma = np.zeros((2 * n, 2 * n))
    for mu in range(2 * n):
        for nu in range(mu + 1, 2 * n):
            comm = m_ops[mu] @ m_ops[nu]
            val = (0.5j * (np.vdot(amplitudes, comm @ amplitudes)
                           - np.vdot(amplitudes, comm.conj().T @ amplitudes))).real
            gamma[mu, nu] = val
            gamma[nu, mu] = -val
    return MajoranaCovariance(gamma, n)
