"""Classical bounds and quantum witnesses for temporal GHZ tests on entangled histories."""

from .classical_bounds import (
    BoundMode,
    Classification,
    classify,
    closed_form_continuous_min,
    closed_form_qubit_min,
    evaluate,
    gradient,
)
from .errors import PreconditionError, TemporalGHZError
from .optimizer import BoundsConfig, OptResult, minimize
from .phase_algebra import PhaseExponent, phase_mul, phase_to_complex, weighted_phase_sum
from .quantum_histories import (
    ghz_history_state,
    odd_dimension_nogo_check,
    temporal_witness_family,
    verify_ghz_paradox,
    witness_expectation,
)
from .timelines import Distribution, Timeline, enumerate_timelines, validate_timeline

__version__ = "0.1.0"
