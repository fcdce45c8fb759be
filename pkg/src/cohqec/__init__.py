"""Desk-scale laboratory for coherent errors under quantum error correction.

A dense state-vector simulator of QEC cycles in the code-capacity setting
(noise, perfect syndrome extraction, active or passive correction), together
with closed-form failure-probability predictors and a Monte Carlo harness
that checks one against the other.
"""

__version__ = "0.1.0"

from .pauli import PauliString, commutes, pauli_mul, weight
from .codes import (
    StabilizerCode,
    SyndromeRecord,
    logical_basis_state,
    random_codespace_init,
    repetition_code,
    rotated_surface_code,
    syndrome_of,
)
from .statevec import (
    StateVector,
    apply_axis_rotations,
    apply_pauli,
    fidelity,
    measure_stabilizer,
)
from .noise import AngleDistribution, NoiseModel, distribution_moment, parse_noise_spec
from .decoder import (
    LookupDecoder,
    MalignantCounts,
    build_lookup_decoder,
    decode,
    enumerate_malignant_sets,
)
from .engine import (
    ACTIVE,
    PASSIVE,
    AlphaDistribution,
    PauliFrame,
    build_decoders,
    exact_alpha_distribution,
    logical_failure,
    qec_cycle,
    run_trajectory,
)
from .analytic import PredictionInput, PredictedCurve, double_factorial, walk_oracle
from .experiments import (
    ExperimentConfig,
    FailureCurve,
    FitResult,
    fit_failure_curve,
    read_curve,
    run_experiment,
    write_curve,
)
