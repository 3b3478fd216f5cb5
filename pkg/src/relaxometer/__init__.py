"""Subsystem evolution speeds and state distances for spin-chain dynamics."""

from .states import DensityMatrix, MetricKind, StateVector
from .qmetric import (
    bures_distance,
    fidelity,
    normalized_schatten2_distance,
    partial_trace,
    pure_trace_distance,
    relative_distance,
    schatten2_distance,
    state_distance,
    trace_distance,
)
from .spinchain import (
    ChainSpec,
    DisorderSpec,
    InitialStateKind,
    Model,
    build_hamiltonian,
    make_initial_state,
    sample_disorder,
    xxz_spec,
)
from .propagate import (
    EigenBasis,
    SpeedEstimate,
    SpeedMethod,
    diagonalize,
    energy_fluctuation,
    evolve,
    subsystem_speed_exact,
    subsystem_speed_fd,
    time_average,
)
from .steadystate import SteadyStateKind, SteadyStateSpec, steady_distance_series, steady_rdm
from .freefermion import (
    MajoranaCovariance,
    QuenchSpec,
    block_covariance,
    gaussian_metric,
    gge_covariance,
    ground_covariance,
    quench_covariance,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
