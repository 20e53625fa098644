"""Block-decomposed Monte Carlo simulator for growing macroscopic spin
coherence out of a thermal ensemble by repeated ancilla readouts, with the
analytics to quantify the result (catness metric, scaling exponents,
Ramsey sensitivity)."""

from .blocks import (
    BlockBasis,
    EnsembleState,
    Sector,
    all_up_state,
    build_block_basis,
    dicke_state,
    dicke_variance,
    pure_symmetric_state,
    thermal_state,
)
from .errors import (
    ConfigurationError,
    ContractViolationError,
    DegenerateProbabilityError,
    DomainError,
    ImpossibleOutcomeError,
)
from .measurement import (
    MINUS,
    PLUS,
    KrausPair,
    apply_outcome,
    build_kraus,
    outcome_probabilities,
)
from .metric import (
    CatnessReport,
    ProjectorSpec,
    catness,
    commutator_projector,
    double_commutator,
    optimal_projector,
    projection_postselect,
    q_prime,
    tr_projection_form,
)
from .analytics import (
    ConvergencePrediction,
    PkDistribution,
    ScalingFit,
    SensitivityEstimate,
    derivative_small_omega,
    fit_scaling,
    fixed_point_magnitude,
    pk_distribution,
    predict_convergence,
    ramsey_uncertainty,
    reference_closed_form,
    reference_ideal,
)
from .trajectory import (
    DEFAULT_CHECKPOINTS,
    EnsembleAverage,
    TrajectoryConfig,
    TrajectoryRecord,
    replay_trajectory,
    run_ensemble,
    run_trajectory,
    sample_outcome,
    trajectory_stream,
)
from .oracle import DenseOracle, max_abs_difference

__version__ = "0.1.0"

__all__ = [
    "BlockBasis",
    "CatnessReport",
    "ConfigurationError",
    "ContractViolationError",
    "ConvergencePrediction",
    "DEFAULT_CHECKPOINTS",
    "DegenerateProbabilityError",
    "DenseOracle",
    "DomainError",
    "EnsembleAverage",
    "EnsembleState",
    "ImpossibleOutcomeError",
    "KrausPair",
    "MINUS",
    "PLUS",
    "PkDistribution",
    "ProjectorSpec",
    "ScalingFit",
    "Sector",
    "SensitivityEstimate",
    "TrajectoryConfig",
    "TrajectoryRecord",
    "all_up_state",
    "apply_outcome",
    "build_block_basis",
    "build_kraus",
    "catness",
    "commutator_projector",
    "derivative_small_omega",
    "dicke_state",
    "dicke_variance",
    "double_commutator",
    "fit_scaling",
    "fixed_point_magnitude",
    "max_abs_difference",
    "optimal_projector",
    "outcome_probabilities",
    "pk_distribution",
    "predict_convergence",
    "projection_postselect",
    "pure_symmetric_state",
    "q_prime",
    "ramsey_uncertainty",
    "reference_closed_form",
    "reference_ideal",
    "replay_trajectory",
    "run_ensemble",
    "run_trajectory",
    "sample_outcome",
    "thermal_state",
    "tr_projection_form",
    "trajectory_stream",
]
