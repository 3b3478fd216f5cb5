"""Sweep engine: runs scenarios and reduces results deterministically.

Execution is unit-parallel: one unit is a single (variant, L, realization)
combination, costing one dense diagonalization plus a time loop.  Units
are computed independently (optionally in a process pool) and reduced in
a canonical order fixed by the config alone, so the emitted rows are
byte-identical for any worker count.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .. import freefermion as ff
from .. import propagate, qmetric, spinchain
from ..errors import ConfigError, ResourceGuardError
from ..spinchain import DENSE_GUARD, ChainSpec, DisorderSpec, InitialStateKind, Model
from ..states import DensityMatrix, MetricKind, StateVector
from .config import PROVENANCE, ExperimentConfig, Scenario

#: largest L for the covariance-based quench scenario (2L x 2L storage)
QUENCH_GUARD = 2048

#: tolerance of the translation-invariance spot check
TI_CHECK_TOL = 1e-8

#: the identity v_A <= Delta H, allowing for roundoff
SPEED_BOUND_SLACK = 1e-8

_STATE_KINDS = {
    "x+": InitialStateKind.X_PLUS,
    "y+": InitialStateKind.Y_PLUS,
    "z+": InitialStateKind.Z_PLUS,
    "neel": InitialStateKind.NEEL,
}

_DENSE_RANDOM = (Scenario.FIG1_RANDOM, Scenario.FIGS2_TFIM_RANDOM)
_DENSE_PRODUCT = (Scenario.FIG2_PRODUCT, Scenario.FIGS3_TFIM_PRODUCT)
_XXZ = (Scenario.FIG3_XXZ, Scenario.FIGS1_TRANSITION)


@dataclass(frozen=True)
class SweepRow:
    """One emitted observation; mirrors the CSV schema exactly."""

    scenario: str
    L: int
    L_A: int
    x: float
    t_or_window: str
    metric: str
    value: float
    value_normalized: float
    stderr: Optional[float]
    seed: str


@dataclass(frozen=True)
class SweepResult:
    config: ExperimentConfig
    rows: Tuple[SweepRow, ...]


@dataclass(frozen=True)
class WorkPlan:
    """Deterministic decomposition of a sweep into tasks."""

    #: fine-grained (unit_key, position, time_index) triples
    tasks: Tuple[Tuple[tuple, int, int], ...]
    #: execution units, one per (variant, L, realization)
    units: Tuple[tuple, ...]
    workers: int


# ---------------------------------------------------------------------------
# scheduling


def _variants(cfg: ExperimentConfig) -> List[Optional[object]]:
    """Scenario sub-cases in canonical order: states, h values, or [None]."""
    if cfg.scenario in _DENSE_PRODUCT:
        return list(cfg.states)
    if cfg.scenario in _XXZ:
        return list(cfg.h_values)
    return [None]


def _unit_keys(cfg: ExperimentConfig) -> List[tuple]:
    keys = []
    for variant in _variants(cfg):
        for L in cfg.sizes:
            for r in range(cfg.realizations):
                keys.append((variant, L, r))
    return keys


def schedule(cfg: ExperimentConfig) -> WorkPlan:
    """Work plan for a config; pure function of the config."""
    cfg.validate()
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    tasks = []
    units = _unit_keys(cfg)
    for key in units:
        _, L, _ = key
        n_pos = L if cfg.scenario in _XXZ else 1
        for p in range(n_pos):
            for ti in range(cfg.time_samples):
                tasks.append((key, p, ti))
    return WorkPlan(tuple(tasks), tuple(units), cfg.workers)


# ---------------------------------------------------------------------------
# dense units


def _chain_spec(cfg: ExperimentConfig, L: int, variant, realization: int) -> ChainSpec:
    prov = PROVENANCE[cfg.scenario]
    sc = cfg.scenario
    if sc in (Scenario.FIG1_RANDOM, Scenario.FIG2_PRODUCT):
        return ChainSpec(Model.CHAOTIC_ISING, L, h_x=prov["h_x"], h_z=prov["h_z"])
    if sc in (Scenario.FIGS2_TFIM_RANDOM, Scenario.FIGS3_TFIM_PRODUCT):
        return ChainSpec(Model.TFIM, L, h_z=prov["h_z"])
    if sc in _XXZ:
        d = DisorderSpec(float(variant), cfg.base_seed, realization)
        return spinchain.xxz_spec(L, prov["delta"], d)
    raise ConfigError(f"no dense chain for scenario {sc}")


def _initial_state(cfg: ExperimentConfig, L: int, variant, realization: int) -> StateVector:
    if cfg.scenario in _DENSE_RANDOM:
        ss = np.random.SeedSequence(entropy=cfg.base_seed, spawn_key=(realization,))
        return spinchain.make_initial_state(InitialStateKind.RANDOM_GAUSSIAN, L, seed=ss)
    if cfg.scenario in _DENSE_PRODUCT:
        return spinchain.make_initial_state(_STATE_KINDS[variant], L)
    return spinchain.make_initial_state(InitialStateKind.NEEL, L)


def _sz_sector(L: int) -> np.ndarray:
    """Basis indices with L/2 down spins (total Sz = 0)."""
    idx = np.arange(2**L)
    pop = np.zeros(2**L, dtype=int)
    for b in range(L):
        pop += (idx >> b) & 1
    return np.where(pop == L // 2)[0]


def _speed_from_cross(cross: np.ndarray) -> float:
    drho = -1j * (cross - cross.conj().T)
    vals = np.linalg.eigvalsh(drho)
    return 0.5 * float(np.abs(vals).sum())


def _run_dense_unit(cfg: ExperimentConfig, key: tuple) -> dict:
    """Time loop for one (variant, L, realization): speeds and distances.

    Returns per-block accumulators; no averaging across realizations
    happens here, so the reduction order is decided by the caller alone.
    """
    variant, L, realization = key
    spec = _chain_spec(cfg, L, variant, realization)
    H = spinchain.build_hamiltonian(spec)
    psi0 = _initial_state(cfg, L, variant, realization)
    blocks = cfg.block_lengths(L)
    times = propagate.time_grid(*cfg.window_for(L), cfg.time_samples)
    xxz = cfg.scenario in _XXZ

    if xxz:
        # The Neel state lives in the conserved Sz = 0 sector; evolving
        # there shrinks the eigenproblem from 2^L to C(L, L/2).
        sector = _sz_sector(L)
        Hs = H[np.ix_(sector, sector)]
        basis = propagate.diagonalize(Hs)
        amp0 = psi0.amplitudes[sector]
        v_tot = float(
            np.sqrt(
                max(
                    np.vdot(amp0, Hs @ (Hs @ amp0)).real
                    - np.vdot(amp0, Hs @ amp0).real ** 2,
                    0.0,
                )
            )
        )
    else:
        basis = propagate.diagonalize(H)
        v_tot = propagate.energy_fluctuation(H, psi0)

    positions = list(range(L)) if xxz else [0]
    n_t = len(times)
    want_series = cfg.emit_series and not xxz and L == max(cfg.sizes)
    random_scenario = cfg.scenario in _DENSE_RANDOM
    metrics = [MetricKind(m) for m in cfg.metrics]

    v_sum = {la: 0.0 for la in blocks}
    v_series = {la: np.zeros(n_t) for la in blocks} if want_series else None
    d_sum = {(m.value, la): 0.0 for m in metrics for la in blocks}
    d_series = (
        {(m.value, la): np.zeros(n_t) for m in metrics for la in blocks}
        if want_series and random_scenario
        else None
    )
    dini_series = (
        {la: np.zeros(n_t) for la in blocks}
        if want_series and random_scenario
        else None
    )
    rdm0 = (
        {la: qmetric.partial_trace(psi0, 0, la) for la in blocks}
        if dini_series is not None
        else None
    )
    refs = (
        {
            la: DensityMatrix(np.eye(2**la) / 2**la, la, validate=False)
            for la in blocks
        }
        if random_scenario
        else None
    )

    dim = 2**L
    for ti, t in enumerate(times):
        if xxz:
            amp_s = _evolve_raw(basis, amp0, t)
            amp = np.zeros(dim, dtype=complex)
            amp[sector] = amp_s
            hamp = np.zeros(dim, dtype=complex)
            hamp[sector] = Hs @ amp_s.real + 1j * (Hs @ amp_s.imag)
            psi_t = StateVector(amp, L)
        else:
            psi_t = propagate.evolve(basis, psi0, t)
            amp = psi_t.amplitudes
            hamp = H @ amp.real + 1j * (H @ amp.imag)

        # Position independence holds when both H and the initial state are
        # translation invariant, i.e. for the product-state scenarios; a
        # random initial state breaks it, so those scenarios keep the
        # single fixed block position without claiming invariance.
        if ti == 0 and cfg.scenario in _DENSE_PRODUCT and L >= 4:
            # spot check: position 0 vs an even shift (Neel is 2-periodic)
            la = blocks[0]
            shift = 2 * (L // 4)
            c0 = qmetric.partial_trace_outer(hamp, amp, L, 0, la)
            c1 = qmetric.partial_trace_outer(hamp, amp, L, shift, la)
            v0, v1 = _speed_from_cross(c0), _speed_from_cross(c1)
            if abs(v0 - v1) > TI_CHECK_TOL:
                raise AssertionError(
                    f"translation-invariance check failed: {v0} vs {v1}"
                )

        for la in blocks:
            for p in positions:
                cross = qmetric.partial_trace_outer(hamp, amp, L, p, la)
                v_sum[la] += _speed_from_cross(cross)
            if v_series is not None:
                cross = qmetric.partial_trace_outer(hamp, amp, L, 0, la)
                v_series[la][ti] = _speed_from_cross(cross)
            if random_scenario:
                rdm = qmetric.partial_trace(psi_t, 0, la)
                for m in metrics:
                    d = qmetric.state_distance(rdm, refs[la], m)
                    d_sum[(m.value, la)] += d
                    if d_series is not None:
                        d_series[(m.value, la)][ti] = d
                if dini_series is not None:
                    dini_series[la][ti] = qmetric.trace_distance(rdm, rdm0[la])

    n_avg = n_t * len(positions)
    payload = {
        "v_tot": v_tot,
        "v_mean": {la: v_sum[la] / n_avg for la in blocks},
        "d_mean": {k: v / n_t for k, v in d_sum.items()},
        "times": times,
        "v_series": v_series,
        "d_series": d_series,
        "dini_series": dini_series,
    }
    return payload


def _evolve_raw(basis: propagate.EigenBasis, amp0: np.ndarray, t: float) -> np.ndarray:
    """Sector-basis analogue of propagate.evolve on raw amplitudes."""
    V = basis.eigenvectors
    coeff = V.T @ amp0.real + 1j * (V.T @ amp0.imag)
    coeff = np.exp(-1j * basis.eigenvalues * t) * coeff
    amp = V @ coeff.real + 1j * (V @ coeff.imag)
    return amp / np.linalg.norm(amp)


# ---------------------------------------------------------------------------
# quench units


def _total_gaussian_distance(q: ff.QuenchSpec, metric: MetricKind) -> float:
    """Distance between the (pure) evolving state and the GGE; constant in t."""
    L = q.num_sites
    g0 = ff.quench_covariance(q, 0.0)
    gge = ff.gge_covariance(q)
    log_ov = ff._log_overlap(g0, gge)  # log tr(rho sigma)
    if metric is MetricKind.BURES:
        fid = np.exp(0.5 * log_ov)  # pure rho: F = sqrt(<psi|sigma|psi>)
        return float(np.sqrt(max(2.0 * (1.0 - fid), 0.0)))
    p1 = np.exp(ff.log_purity(g0))
    p2 = np.exp(ff.log_purity(gge))
    ov = np.exp(log_ov)
    if metric is MetricKind.SCHATTEN2:
        return float(np.sqrt(max((p1 + p2 - 2 * ov) / 2.0, 0.0)))
    if metric is MetricKind.NORMALIZED_SCHATTEN2:
        return float(np.sqrt(max((p1 + p2 - 2 * ov) / (p1 + p2), 0.0)))
    if metric is MetricKind.RELATIVE_DISTANCE:
        s = ff.gaussian_relative_entropy(g0, gge)
        return float(np.sqrt(s / 2.0))
    raise ConfigError(f"no Gaussian total distance for {metric}")


def _run_quench_unit(cfg: ExperimentConfig, key: tuple) -> dict:
    _, L, _ = key
    prov = PROVENANCE[cfg.scenario]
    q = ff.QuenchSpec(prov["h0"], prov["h1"], L)
    gge = ff.gge_covariance(q)
    t_star = prov["t_star_factor"] * L
    a, b = cfg.window_for(L)
    times = propagate.time_grid(a, b, cfg.time_samples)
    blocks = cfg.block_lengths(L)
    metrics = [MetricKind(m) for m in cfg.metrics]
    speed_metrics = [m for m in metrics if m is not MetricKind.RELATIVE_DISTANCE]

    u_tot = ff.covariance_energy_fluctuation(ff.quench_covariance(q, 0.0), q.h1)
    totals = {m.value: _total_gaussian_distance(q, m) for m in metrics}

    gge_blocks = {la: ff.block_covariance(gge, 0, la) for la in blocks}
    d_series = {(m.value, la): np.zeros(len(times)) for m in metrics for la in blocks}
    u_series = {
        (m.value, la): np.zeros(len(times)) for m in speed_metrics for la in blocks
    }
    for ti, t in enumerate(times):
        gt = ff.quench_covariance(q, t)
        for la in blocks:
            bt = ff.block_covariance(gt, 0, la)
            for m in metrics:
                d_series[(m.value, la)][ti] = ff.gaussian_metric(bt, gge_blocks[la], m)
            for m in speed_metrics:
                u_series[(m.value, la)][ti] = ff.gaussian_speed_fd(q, t, 0, la, m)

    # x profile at the fixed relaxation time t* = 3L/8.  Blocks stop at
    # L/2: the covariance fidelity is ill-conditioned for larger blocks
    # (both states nearly pure), and the relaxation statements concern
    # subsystems below half the chain anyway.
    profile_blocks = tuple(range(2, L // 2 + 1, 2))
    g_star = ff.quench_covariance(q, t_star)
    profile = {m.value: np.zeros(len(profile_blocks)) for m in metrics}
    for i, la in enumerate(profile_blocks):
        b_star = ff.block_covariance(g_star, 0, la)
        b_gge = ff.block_covariance(gge, 0, la)
        for m in metrics:
            profile[m.value][i] = ff.gaussian_metric(b_star, b_gge, m)

    return {
        "u_tot": u_tot,
        "totals": totals,
        "times": times,
        "t_star": t_star,
        "d_series": d_series,
        "u_series": u_series,
        "profile_blocks": profile_blocks,
        "profile": profile,
    }


# ---------------------------------------------------------------------------
# orchestration and reduction


def _guard(cfg: ExperimentConfig) -> None:
    if cfg.scenario is Scenario.FIGS4_QUENCH:
        if max(cfg.sizes) > QUENCH_GUARD:
            raise ResourceGuardError(
                f"L={max(cfg.sizes)} exceeds the quench guard ({QUENCH_GUARD})"
            )
        return
    if max(cfg.sizes) > DENSE_GUARD:
        raise ResourceGuardError(
            f"L={max(cfg.sizes)} exceeds the dense guard ({DENSE_GUARD})"
        )


def _check_provenance(cfg: ExperimentConfig) -> None:
    prov = PROVENANCE[cfg.scenario]
    if cfg.scenario in (Scenario.FIG1_RANDOM, Scenario.FIG2_PRODUCT):
        assert prov["h_x"] == float(np.sqrt(3.0) / 2.0)
        assert prov["h_z"] == float(np.sqrt(2.0))
    if cfg.scenario is Scenario.FIGS4_QUENCH:
        assert prov["h0"] == float(np.sqrt(2.0))
        assert prov["h1"] == 1.0
        assert prov["t_star_factor"] == 3.0 / 8.0


_WORK_CFG: Optional[ExperimentConfig] = None


def _pool_init(cfg_dict: dict) -> None:
    global _WORK_CFG
    _WORK_CFG = ExperimentConfig.from_dict(cfg_dict)


def _pool_run(key: tuple):
    if _WORK_CFG.scenario is Scenario.FIGS4_QUENCH:
        return key, _run_quench_unit(_WORK_CFG, key)
    return key, _run_dense_unit(_WORK_CFG, key)


def _compute_units(cfg: ExperimentConfig, workers: int) -> Dict[tuple, dict]:
    keys = _unit_keys(cfg)
    quench = cfg.scenario is Scenario.FIGS4_QUENCH
    runner = _run_quench_unit if quench else _run_dense_unit
    n_workers = min(workers, len(keys))
    if n_workers <= 1:
        return {key: runner(cfg, key) for key in keys}
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(
        n_workers, initializer=_pool_init, initargs=(cfg.to_dict(),)
    ) as pool:
        results = pool.map(_pool_run, keys, chunksize=1)
    return dict(results)


def _fmt_window(window: Tuple[float, float]) -> str:
    return f"[{window[0]:g},{window[1]:g}]"


def _tag(cfg: ExperimentConfig, variant) -> str:
    base = cfg.scenario.value
    if cfg.scenario in _DENSE_PRODUCT:
        return f"{base}[{variant}]"
    if cfg.scenario in _XXZ:
        return f"{base}[h={variant!r}]"
    return base


def _check_speed_bound(value_normalized: float) -> float:
    assert value_normalized <= 1.0 + SPEED_BOUND_SLACK, (
        f"normalized speed {value_normalized} violates v_A <= Delta H"
    )
    return value_normalized


def run_scenario(cfg: ExperimentConfig, workers: Optional[int] = None) -> SweepResult:
    """Run one scenario end to end and return the full row set.

    Disordered scenarios apply the three-fold averaging (time window, all
    L block positions, N_r realizations); translation-invariant models
    skip position averaging after a runtime spot check.
    """
    cfg.validate()
    _guard(cfg)
    _check_provenance(cfg)
    if workers is None:
        workers = cfg.workers
    payloads = _compute_units(cfg, workers)

    rows: List[SweepRow] = []
    if cfg.scenario is Scenario.FIGS4_QUENCH:
        _reduce_quench(cfg, payloads, rows)
    else:
        _reduce_dense(cfg, payloads, rows)
    return SweepResult(cfg, tuple(rows))


def _maxmixed_total(metric: MetricKind, dim: int) -> float:
    """Distance between a pure state and the maximally mixed state."""
    if metric is MetricKind.TRACE_DISTANCE:
        return 1.0 - 1.0 / dim
    if metric is MetricKind.BURES:
        return float(np.sqrt(2.0 * (1.0 - dim**-0.5)))
    if metric is MetricKind.SCHATTEN2:
        return float(np.sqrt((1.0 - 1.0 / dim) / 2.0))
    if metric is MetricKind.NORMALIZED_SCHATTEN2:
        return float(np.sqrt((1.0 - 1.0 / dim) / (1.0 + 1.0 / dim)))
    if metric is MetricKind.RELATIVE_DISTANCE:
        return float(np.sqrt(np.log(dim) / 2.0))
    raise ConfigError(f"unknown metric {metric}")


def _reduce_dense(cfg: ExperimentConfig, payloads: Dict[tuple, dict], rows: list) -> None:
    random_scenario = cfg.scenario in _DENSE_RANDOM
    n_r = cfg.realizations
    for variant in _variants(cfg):
        tag = _tag(cfg, variant)
        for L in cfg.sizes:
            window = _fmt_window(cfg.window_for(L))
            blocks = cfg.block_lengths(L)
            per_r = [payloads[(variant, L, r)] for r in range(n_r)]
            v_tots = np.array([p["v_tot"] for p in per_r])
            for la in blocks:
                x = la / L
                v_r = np.array([p["v_mean"][la] for p in per_r])
                value = float(np.mean(v_r))
                norm = _check_speed_bound(value / float(np.mean(v_tots)))
                stderr = (
                    float(np.std(v_r, ddof=1) / np.sqrt(n_r)) if n_r > 1 else None
                )
                seed = f"{cfg.base_seed}:0-{n_r - 1}" if n_r > 1 else f"{cfg.base_seed}:0"
                rows.append(
                    SweepRow(tag, L, la, x, window, "v", value, norm, stderr, seed)
                )
                if n_r > 1:
                    for r in range(n_r):
                        rows.append(
                            SweepRow(
                                tag, L, la, x, window, "v",
                                float(v_r[r]),
                                _check_speed_bound(float(v_r[r] / v_tots[r])),
                                None,
                                f"{cfg.base_seed}:{r}",
                            )
                        )
                if random_scenario:
                    for m in cfg.metrics:
                        d_r = np.array([p["d_mean"][(m, la)] for p in per_r])
                        d_tot = _maxmixed_total(MetricKind(m), 2**L)
                        rows.append(
                            SweepRow(
                                tag, L, la, x, window, f"D_ss.{m}",
                                float(np.mean(d_r)),
                                float(np.mean(d_r) / d_tot),
                                float(np.std(d_r, ddof=1) / np.sqrt(n_r))
                                if n_r > 1
                                else None,
                                f"{cfg.base_seed}:0-{n_r - 1}"
                                if n_r > 1
                                else f"{cfg.base_seed}:0",
                            )
                        )
            # per-time rows at the largest size, first realization
            p0 = per_r[0]
            if p0["v_series"] is not None:
                times = p0["times"]
                v_tot = p0["v_tot"]
                for la in blocks:
                    x = la / L
                    series = p0["v_series"][la]
                    v_mean = float(np.mean(series))
                    for ti, t in enumerate(times):
                        rows.append(
                            SweepRow(
                                tag, L, la, x, repr(float(t)), "v",
                                float(series[ti]),
                                _check_speed_bound(float(series[ti] / v_tot)),
                                None, f"{cfg.base_seed}:0",
                            )
                        )
                        rows.append(
                            SweepRow(
                                tag, L, la, x, repr(float(t)), "v_dev",
                                float(series[ti] - v_mean),
                                float((series[ti] - v_mean) / v_tot),
                                None, f"{cfg.base_seed}:0",
                            )
                        )
                    if p0["d_series"] is not None:
                        for m in cfg.metrics:
                            d_tot = _maxmixed_total(MetricKind(m), 2**L)
                            ser = p0["d_series"][(m, la)]
                            for ti, t in enumerate(times):
                                rows.append(
                                    SweepRow(
                                        tag, L, la, x, repr(float(t)), f"D_ss.{m}",
                                        float(ser[ti]), float(ser[ti] / d_tot),
                                        None, f"{cfg.base_seed}:0",
                                    )
                                )
                    if p0["dini_series"] is not None:
                        ser = p0["dini_series"][la]
                        for ti, t in enumerate(times):
                            rows.append(
                                SweepRow(
                                    tag, L, la, x, repr(float(t)), "D_ini.trace",
                                    float(ser[ti]), float(ser[ti]),
                                    None, f"{cfg.base_seed}:0",
                                )
                            )


def _reduce_quench(cfg: ExperimentConfig, payloads: Dict[tuple, dict], rows: list) -> None:
    tag = cfg.scenario.value
    seed = f"{cfg.base_seed}:0"
    for L in cfg.sizes:
        p = payloads[(None, L, 0)]
        times, u_tot, totals = p["times"], p["u_tot"], p["totals"]
        for la in cfg.block_lengths(L):
            x = la / L
            for m in cfg.metrics:
                ser = p["d_series"][(m, la)]
                for ti, t in enumerate(times):
                    rows.append(
                        SweepRow(
                            tag, L, la, x, repr(float(t)), f"D_ss.{m}",
                            float(ser[ti]), float(ser[ti] / totals[m]),
                            None, seed,
                        )
                    )
                if (m, la) in p["u_series"]:
                    ser = p["u_series"][(m, la)]
                    for ti, t in enumerate(times):
                        rows.append(
                            SweepRow(
                                tag, L, la, x, repr(float(t)), f"u.{m}",
                                float(ser[ti]), float(ser[ti] / u_tot),
                                None, seed,
                            )
                        )
        t_star = repr(float(p["t_star"]))
        for i, la in enumerate(p["profile_blocks"]):
            for m in cfg.metrics:
                val = float(p["profile"][m][i])
                rows.append(
                    SweepRow(
                        tag, L, la, la / L, t_star, f"D_star.{m}",
                        val, float(val / totals[m]), None, seed,
                    )
                )
