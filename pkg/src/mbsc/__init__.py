"""Modular bosonic subsystem decomposition of a CV mode into a logical qubit and a gauge mode."""

from .analysis import (
    LogicalDensityMatrix,
    SchmidtData,
    bloch_vector,
    gauge_trace,
    gauge_trace_two_mode,
    logical_fidelity,
    purity,
    schmidt_data,
)
from .cluster import (
    GraphAdjacency,
    TwoModeState,
    apply_cz,
    hidden_cluster_experiment,
    modular_measure_and_correct,
    phase_identity_check,
    product_state,
)
from .gkp import ApproxGkpParams, approx_gkp_state, kappa_sweep, small_spike_logical_state, theta3
from .modular import SQRT_PI, BinSpec, decompose, recompose, subsystem_labels
from .states import (
    ModeWavefunction,
    PositionGrid,
    apply_momentum_phase,
    apply_position_shift,
    gaussian_state,
    inner_product,
    make_grid,
    momentum_squeezed_state,
)

__version__ = "0.1.0"

__all__ = [
    "apply_cz",
    "apply_momentum_phase",
    "apply_position_shift",
    "approx_gkp_state",
    "ApproxGkpParams",
    "BinSpec",
    "bloch_vector",
    "decompose",
    "gauge_trace",
    "gauge_trace_two_mode",
    "gaussian_state",
    "GraphAdjacency",
    "hidden_cluster_experiment",
    "inner_product",
    "kappa_sweep",
    "logical_fidelity",
    "LogicalDensityMatrix",
    "make_grid",
    "ModeWavefunction",
    "modular_measure_and_correct",
    "momentum_squeezed_state",
    "phase_identity_check",
    "PositionGrid",
    "product_state",
    "purity",
    "recompose",
    "schmidt_data",
    "SchmidtData",
    "small_spike_logical_state",
    "SQRT_PI",
    "subsystem_labels",
    "theta3",
    "TwoModeState",
]
