"""Finite-resolution photon-number measurements on truncated Fock-space states.

The package simulates a Gaussian-kernel number measurement of width dn
on states in a truncated number basis: outcome densities, conditional
post-measurement states and their coherence, the non-selective
decoherence map, quantization/coherence correlations across outcomes,
and Monte-Carlo trajectories of repeated measurements. Closed-form
coherent-state expressions double as independent oracles for the
operator pipeline.
"""

from .closed_form import (
    CoherentSeries,
    avg_coherence,
    avg_product,
    avg_quantization,
    coherent_outcome_density,
    coherent_post_coherence,
    correlation_closed,
    optimal_resolution,
)
from .correlation import (
    CorrelationReport,
    correlation_numeric,
    operator_correlation,
    quantization,
    quantization_operator_expectation,
    resolution_sweep,
)
from .errors import (
    FockPovmError,
    GridInsufficient,
    IndexOutOfRange,
    InvalidResolution,
    InvalidState,
    NegligibleOutcome,
    TruncationTooSmall,
)
from .fock import (
    DensityMatrix,
    TruncationConfig,
    annihilation_expectation,
    default_dim,
    make_coherent_state,
    make_fock_state,
    number_expectation,
    purity,
)
from .measurement import (
    MeasurementOperator,
    MeasurementRecord,
    OutcomeGrid,
    Resolution,
    apply_measurement,
    default_grid,
    make_measurement_operator,
    nonselective_update,
    outcome_density,
)
from .trajectory import (
    EnsembleStats,
    TrajectoryConfig,
    TrajectoryStep,
    collapse_chi_square,
    ensemble_stats,
    run_trajectory,
    sample_outcome,
    sample_outcomes,
)

__version__ = "0.1.0"

__all__ = [
    "CoherentSeries",
    "CorrelationReport",
    "DensityMatrix",
    "EnsembleStats",
    "FockPovmError",
    "GridInsufficient",
    "IndexOutOfRange",
    "InvalidResolution",
    "InvalidState",
    "MeasurementOperator",
    "MeasurementRecord",
    "NegligibleOutcome",
    "OutcomeGrid",
    "Resolution",
    "TrajectoryConfig",
    "TrajectoryStep",
    "TruncationConfig",
    "TruncationTooSmall",
    "annihilation_expectation",
    "apply_measurement",
    "avg_coherence",
    "avg_product",
    "avg_quantization",
    "coherent_outcome_density",
    "coherent_post_coherence",
    "collapse_chi_square",
    "correlation_closed",
    "correlation_numeric",
    "default_dim",
    "default_grid",
    "ensemble_stats",
    "make_coherent_state",
    "make_fock_state",
    "make_measurement_operator",
    "nonselective_update",
    "number_expectation",
    "operator_correlation",
    "optimal_resolution",
    "outcome_density",
    "purity",
    "quantization",
    "quantization_operator_expectation",
    "resolution_sweep",
    "run_trajectory",
    "sample_outcome",
    "sample_outcomes",
]
