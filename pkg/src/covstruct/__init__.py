"""Covariance-structure classification for adaptive radar snapshots.

The package fits four nested interference covariance models to secondary
snapshot data (general Hermitian, real symmetric, centrohermitian, and real
centrosymmetric), scores each with information-theoretic model-order rules,
and measures probability of correct classification over Monte Carlo trials.
"""

from .criteria import (
    DEFAULT_CRITERIA,
    Criterion,
    CriterionKind,
    HypothesisScore,
    Scorecard,
    classify,
    classify_batch,
    parse_criterion,
    prepare_estimates,
)
from .datafmt import DataFormatError, dumps_dataset, loads_dataset, read_dataset, write_dataset
from .estimators import (
    Approach,
    Dataset,
    DegenerateSteeringError,
    EstimateSet,
    estimate_all,
    estimate_alpha,
    estimate_covariance,
)
from .likelihood import fim_pair, loglik_full, loglik_secondary, observed_fim, sample_fim
from .linalg import NotPositiveDefiniteError
from .montecarlo import (
    CampaignConfig,
    CellStats,
    PccReport,
    confusion_histogram,
    run_campaign,
)
from .scenario import (
    ScenarioConfig,
    SourceParams,
    TruthInstance,
    sample_dataset,
    steering_vector,
    table_case,
    truth_instance,
)
from .structures import (
    Hypothesis,
    StructureModel,
    StructureViolationError,
    param_count,
    project,
    satisfies_structure,
    structure_model,
    structure_residual,
)

__version__ = "0.1.0"

__all__ = [
    "Approach",
    "CampaignConfig",
    "CellStats",
    "Criterion",
    "CriterionKind",
    "DEFAULT_CRITERIA",
    "DataFormatError",
    "Dataset",
    "DegenerateSteeringError",
    "EstimateSet",
    "Hypothesis",
    "HypothesisScore",
    "NotPositiveDefiniteError",
    "PccReport",
    "ScenarioConfig",
    "Scorecard",
    "SourceParams",
    "StructureModel",
    "StructureViolationError",
    "TruthInstance",
    "classify",
    "classify_batch",
    "confusion_histogram",
    "dumps_dataset",
    "estimate_all",
    "estimate_alpha",
    "estimate_covariance",
    "fim_pair",
    "loglik_full",
    "loglik_secondary",
    "loads_dataset",
    "observed_fim",
    "param_count",
    "parse_criterion",
    "prepare_estimates",
    "project",
    "read_dataset",
    "run_campaign",
    "sample_dataset",
    "sample_fim",
    "satisfies_structure",
    "steering_vector",
    "structure_model",
    "structure_residual",
    "table_case",
    "truth_instance",
    "write_dataset",
    "__version__",
]
