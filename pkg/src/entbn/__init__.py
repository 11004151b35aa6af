"""Discrete Bayesian networks over title/question entity classes.

Learns DAG structures (score-based hill climbing or Chow-Liu trees), fits
CPTs by maximum likelihood, answers conditional queries exactly or by
sampling, and evaluates multilabel entity prediction.
"""

from .catalog import ENTITY_CLASSES, canonical_column_names, canonical_variables
from .core import (
    Assignment,
    BayesianNetwork,
    Cpt,
    Dag,
    Dataset,
    Role,
    Variable,
    forward_sample,
    joint_probability,
    log_likelihood,
    topological_order,
)
from .data_io import ingest_csv, write_csv
from .dot_export import dot_text, export_dot
from .errors import (
    AcceptanceStarvationError,
    CapacityError,
    DegenerateEvidenceError,
    EntbnError,
    InconsistentEvidenceError,
    IngestionError,
    InitializationError,
    InputError,
    SplitError,
    StructuralError,
)
from .inference import (
    InferenceMethod,
    Posterior,
    Query,
    batch_posteriors,
    enumerate_posterior,
    gibbs_sampling,
    likelihood_weighting,
    query_posterior,
    rejection_sampling,
    variable_elimination,
)
from .model_io import load_model, model_from_json, model_to_json, save_model
from .parameters import fit_mle
from .pipeline import (
    EvaluationReport,
    Learner,
    ModelConfig,
    SplitSpec,
    ZeroDivision,
    compare_models,
    compare_report_csv,
    compare_report_text,
    default_compare_configs,
    evaluate,
    evaluation_text,
    learn_model,
    predict_dataset,
    predict_question_entities,
    question_probabilities,
    random_baseline_predictions,
    train_test_split,
)
from .scoring import FamilyStats, ScoreKind, ScoreMetric, family_score, num_parameters, structure_score
from .structure import (
    HillClimbResult,
    SearchConfig,
    chi_square_critical_value,
    chi_square_statistic,
    chow_liu,
    hill_climb,
    hill_climb_detailed,
    mutual_information,
    prune_edges,
)
from .synthetic import build_synthetic_network, generate_synthetic

__version__ = "0.1.0"
