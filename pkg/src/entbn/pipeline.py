"""End-to-end experiment: split, train, predict question entities, evaluate.

The one-vs-rest predictor conditions every question variable on the full
title vector and thresholds its posterior. Evaluation is multilabel with
macro and weighted aggregates; weights are target-positive shares.
"""

from __future__ import annotations

import enum
import math
import zlib
from dataclasses import dataclass

import numpy as np

from .core import BayesianNetwork, Dataset, Role
from .errors import (
    AcceptanceStarvationError,
    DegenerateEvidenceError,
    InconsistentEvidenceError,
    InitializationError,
    InputError,
    SplitError,
)
from .inference import InferenceMethod, Query, batch_posteriors, variable_elimination
from .parameters import fit_mle
from .scoring import ScoreKind, ScoreMetric
from .structure import SearchConfig, chow_liu, hill_climb, prune_edges

_REDRAW_CAP = 1_000


# ---------------------------------------------------------------------------
# Splitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    """Test fraction plus the seed driving the (re-)draws.

    The split guarantees that every variable positive somewhere in the test
    rows is positive somewhere in the training rows, enforced by redrawing
    up to 1_000 times.
    """

    test_fraction: float = 0.30
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise InputError("test_fraction must lie strictly between 0 and 1")


def _coverage_ok(train_records: np.ndarray, test_records: np.ndarray) -> bool:
    if test_records.shape[0] == 0:
        return True
    test_present = test_records.max(axis=0) > 0
    train_present = train_records.max(axis=0) > 0
    return bool(np.all(train_present[test_present]))


def train_test_split(d: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Disjoint, exhaustive partition with test size floor(fraction * N)."""
    if d.n_rows < 2:
        raise InputError("need at least 2 rows to split")
    test_size = math.floor(spec.test_fraction * d.n_rows)
    rng = np.random.default_rng(spec.seed)
    for _ in range(_REDRAW_CAP):
        perm = rng.permutation(d.n_rows)
        test_idx = np.sort(perm[:test_size])
        train_idx = np.sort(perm[test_size:])
        if _coverage_ok(d.records[train_idx], d.records[test_idx]):
            return d.take_rows(train_idx), d.take_rows(test_idx)
    raise SplitError(
        f"no split with full class coverage found in {_REDRAW_CAP} draws"
    )


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


class ZeroDivision(enum.Enum):
    """What to do with per-class metrics whose denominator is zero.

    EXCLUDE drops them from the macro mean (the default; it changes macro
    numbers compared to tools that count them as zero). ZERO counts them
    as 0.0. Either way a class with no target positives has weight 0 in
    the weighted aggregate.
    """

    EXCLUDE = "exclude"
    ZERO = "zero"


@dataclass(frozen=True)
class ClassMetrics:
    name: str
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float | None
    recall: float | None
    f1: float | None
    support: int
    weight: float


@dataclass(frozen=True)
class EvaluationReport:
    per_class: tuple[ClassMetrics, ...]
    zero_division: ZeroDivision
    precision_macro: float
    precision_weighted: float
    recall_macro: float
    recall_weighted: float
    f1_macro: float
    f1_weighted: float

    def aggregate(self, metric: str, kind: str) -> float:
        return getattr(self, f"{metric}_{kind}")


def _macro(values: list[float | None], policy: ZeroDivision) -> float:
    if policy is ZeroDivision.ZERO:
        kept = [0.0 if v is None else v for v in values]
    else:
        kept = [v for v in values if v is not None]
    return sum(kept) / len(kept) if kept else 0.0


def _weighted(values: list[float | None], weights: list[float]) -> float:
    return sum((0.0 if v is None else v) * w for v, w in zip(values, weights))


def evaluate(
    predictions,
    targets,
    class_names: list[str] | None = None,
    zero_division: ZeroDivision = ZeroDivision.EXCLUDE,
) -> EvaluationReport:
    """Multilabel confusion counts and macro/weighted aggregates.

    `predictions` and `targets` are aligned (n_samples, n_classes) binary
    arrays. Weight W_i is class i's share of all target positives.
    """
    preds = np.asarray(predictions, dtype=np.int64)
    targs = np.asarray(targets, dtype=np.int64)
    if preds.ndim != 2 or preds.shape != targs.shape:
        raise InputError(
            f"predictions shape {preds.shape} does not match targets {targs.shape}"
        )
    for label, arr in (("predictions", preds), ("targets", targs)):
        if arr.size and (arr.min() < 0 or arr.max() > 1):
            raise InputError(f"{label} must be binary")
    n_classes = preds.shape[1]
    if class_names is None:
        class_names = [f"class_{k}" for k in range(n_classes)]
    if len(class_names) != n_classes:
        raise InputError("one class name per column required")

    tp = ((preds == 1) & (targs == 1)).sum(axis=0)
    fp = ((preds == 1) & (targs == 0)).sum(axis=0)
    fn = ((preds == 0) & (targs == 1)).sum(axis=0)
    tn = ((preds == 0) & (targs == 0)).sum(axis=0)
    support = tp + fn
    total_support = int(support.sum())

    per_class = []
    precisions: list[float | None] = []
    recalls: list[float | None] = []
    f1s: list[float | None] = []
    weights = []
    for k in range(n_classes):
        precision = float(tp[k] / (tp[k] + fp[k])) if tp[k] + fp[k] else None
        recall = float(tp[k] / (tp[k] + fn[k])) if tp[k] + fn[k] else None
        if precision is None or recall is None:
            f1 = None
        elif precision + recall == 0.0:
            f1 = 0.0
        else:
            f1 = 2.0 * precision * recall / (precision + recall)
        weight = float(support[k] / total_support) if total_support else 0.0
        per_class.append(
            ClassMetrics(
                class_names[k],
                int(tp[k]),
                int(fp[k]),
                int(fn[k]),
                int(tn[k]),
                precision,
                recall,
                f1,
                int(support[k]),
                weight,
            )
        )
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)
        weights.append(weight)

    return EvaluationReport(
        tuple(per_class),
        zero_division,
        precision_macro=_macro(precisions, zero_division),
        precision_weighted=_weighted(precisions, weights),
        recall_macro=_macro(recalls, zero_division),
        recall_weighted=_weighted(recalls, weights),
        f1_macro=_macro(f1s, zero_division),
        f1_weighted=_weighted(f1s, weights),
    )


def evaluation_text(report: EvaluationReport) -> str:
    """Aligned per-class table plus the six aggregates."""

    def fmt(v: float | None) -> str:
        return "-" if v is None else f"{v:.6f}"

    width = max([len("class")] + [len(c.name) for c in report.per_class])
    header = (
        f"{'class':<{width}}  {'tp':>6} {'fp':>6} {'fn':>6} {'tn':>6} "
        f"{'precision':>10} {'recall':>10} {'f1':>10} {'support':>8}"
    )
    lines = [header]
    for c in report.per_class:
        lines.append(
            f"{c.name:<{width}}  {c.tp:>6} {c.fp:>6} {c.fn:>6} {c.tn:>6} "
            f"{fmt(c.precision):>10} {fmt(c.recall):>10} {fmt(c.f1):>10} "
            f"{c.support:>8}"
        )
    lines.append("")
    lines.append(f"zero-division policy: {report.zero_division.value}")
    for metric in ("precision", "recall", "f1"):
        lines.append(
            f"{metric}_macro={report.aggregate(metric, 'macro'):.6f} "
            f"{metric}_weighted={report.aggregate(metric, 'weighted'):.6f}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Prediction
# ---------------------------------------------------------------------------


def _role_ids(bn: BayesianNetwork, role: Role) -> list[int]:
    return [v.id for v in bn.variables if v.role is role]


def _derived_seed(master: int, index: int) -> int:
    return int(np.random.SeedSequence((master, index)).generate_state(1)[0])


def _prior_question_probabilities(
    bn: BayesianNetwork, question_ids: list[int]
) -> np.ndarray:
    return np.array(
        [variable_elimination(bn, Query(t)).p(1) for t in question_ids]
    )


def question_probabilities(
    bn: BayesianNetwork,
    title_vector,
    method: InferenceMethod = InferenceMethod.VARIABLE_ELIMINATION,
    n_samples: int = 10_000,
    burn_in: int = 1_000,
    seed: int = 0,
) -> np.ndarray:
    """P(question class present | full title vector) for every question class.

    Evidence the model cannot explain (zero probability, all-zero weights,
    rejection starvation, or no consistent initial state) falls back to the
    prior marginals, so prediction never aborts mid-dataset.
    """
    title_ids = _role_ids(bn, Role.TITLE)
    question_ids = _role_ids(bn, Role.QUESTION)
    if not title_ids or not question_ids:
        raise InputError("network needs both title and question variables")
    vec = np.asarray(title_vector).reshape(-1)
    if vec.shape[0] != len(title_ids):
        raise InputError(
            f"title vector has {vec.shape[0]} values, network has "
            f"{len(title_ids)} title variables"
        )
    if vec.size and (vec.min() < 0 or vec.max() > 1):
        raise InputError("title vector must be binary")
    evidence = {tid: int(bit) for tid, bit in zip(title_ids, vec)}
    try:
        posteriors = batch_posteriors(
            bn, question_ids, evidence, method, n_samples, burn_in, seed
        )
        return np.array([p.p(1) for p in posteriors])
    except (
        InconsistentEvidenceError,
        DegenerateEvidenceError,
        AcceptanceStarvationError,
        InitializationError,
    ):
        return _prior_question_probabilities(bn, question_ids)


def predict_question_entities(
    bn: BayesianNetwork,
    title_vector,
    method: InferenceMethod = InferenceMethod.VARIABLE_ELIMINATION,
    threshold: float = 0.5,
    seed: int = 0,
    n_samples: int = 10_000,
    burn_in: int = 1_000,
) -> np.ndarray:
    """One-vs-rest hard predictions: 1 iff P(present | titles) >= threshold."""
    probs = question_probabilities(bn, title_vector, method, n_samples, burn_in, seed)
    return (probs >= threshold).astype(np.uint8)


def predict_dataset(
    bn: BayesianNetwork,
    title_matrix,
    method: InferenceMethod = InferenceMethod.VARIABLE_ELIMINATION,
    threshold: float = 0.5,
    seed: int = 0,
    n_samples: int = 10_000,
    burn_in: int = 1_000,
) -> np.ndarray:
    """Predictions for many title vectors.

    Duplicate title vectors share one posterior computation; each distinct
    vector gets its own RNG stream derived from (seed, vector index), so
    results do not depend on row order beyond the vectors themselves.
    """
    matrix = np.asarray(title_matrix, dtype=np.uint8)
    if matrix.ndim != 2:
        raise InputError("title matrix must be two-dimensional")
    if matrix.shape[0] == 0:
        return np.zeros((0, len(_role_ids(bn, Role.QUESTION))), dtype=np.uint8)
    unique_rows, inverse = np.unique(matrix, axis=0, return_inverse=True)
    predictions = np.zeros(
        (unique_rows.shape[0], len(_role_ids(bn, Role.QUESTION))), dtype=np.uint8
    )
    for i, vec in enumerate(unique_rows):
        predictions[i] = predict_question_entities(
            bn,
            vec,
            method,
            threshold,
            seed=_derived_seed(seed, i),
            n_samples=n_samples,
            burn_in=burn_in,
        )
    return predictions[inverse]


def random_baseline_predictions(
    train: Dataset, test: Dataset, seed: int
) -> np.ndarray:
    """Bernoulli guesses at each question class's training marginal rate."""
    q_ids = [v.id for v in train.variables if v.role is Role.QUESTION]
    if not q_ids:
        raise InputError("dataset has no question variables")
    rates = train.records[:, q_ids].mean(axis=0)
    rng = np.random.default_rng(seed)
    return (rng.random((test.n_rows, len(q_ids))) < rates).astype(np.uint8)


# ---------------------------------------------------------------------------
# Model comparison
# ---------------------------------------------------------------------------


class Learner(enum.Enum):
    HILL_CLIMB = "hill-climb"
    CHOW_LIU = "chow-liu"


@dataclass(frozen=True)
class ModelConfig:
    """One comparison row: how to learn the structure and how to predict."""

    label: str
    learner: Learner
    metric: ScoreMetric | None = None
    method: InferenceMethod = InferenceMethod.VARIABLE_ELIMINATION
    n_samples: int = 10_000
    burn_in: int = 1_000
    threshold: float = 0.5
    prune: bool = False
    significance: float = 0.05
    max_parents: int | None = None
    root: int = 0

    def __post_init__(self):
        if not self.label:
            raise InputError("model config needs a label")
        if self.learner is Learner.HILL_CLIMB and self.metric is None:
            raise InputError(f"config {self.label!r}: hill climbing needs a metric")


def default_compare_configs() -> tuple[ModelConfig, ...]:
    """The standard comparison matrix: three score-based learners evaluated
    exactly, plus one tree learner paired with each inference scheme."""
    ve = InferenceMethod.VARIABLE_ELIMINATION
    return (
        ModelConfig("hill-climb-bic", Learner.HILL_CLIMB, ScoreMetric(ScoreKind.BIC), ve),
        ModelConfig("hill-climb-bdeu", Learner.HILL_CLIMB, ScoreMetric(ScoreKind.BDEU), ve),
        ModelConfig("hill-climb-k2", Learner.HILL_CLIMB, ScoreMetric(ScoreKind.K2), ve),
        ModelConfig("chow-liu-ve", Learner.CHOW_LIU, None, ve),
        ModelConfig(
            "chow-liu-lw",
            Learner.CHOW_LIU,
            None,
            InferenceMethod.LIKELIHOOD_WEIGHTING,
            n_samples=10_000,
        ),
        ModelConfig(
            "chow-liu-gs",
            Learner.CHOW_LIU,
            None,
            InferenceMethod.GIBBS,
            n_samples=2_000,
            burn_in=500,
        ),
        ModelConfig(
            "chow-liu-rs",
            Learner.CHOW_LIU,
            None,
            InferenceMethod.REJECTION_SAMPLING,
            n_samples=1_000,
        ),
    )


@dataclass(frozen=True)
class CompareRow:
    config: ModelConfig
    network: BayesianNetwork
    report: EvaluationReport


def learn_model(train: Dataset, config: ModelConfig) -> BayesianNetwork:
    """Structure search, optional pruning, then MLE fitting."""
    if config.learner is Learner.CHOW_LIU:
        dag = chow_liu(train, root=config.root)
    else:
        dag = hill_climb(
            train, SearchConfig(config.metric, max_parents=config.max_parents)
        )
    if config.prune:
        dag = prune_edges(dag, train, config.significance)
    return fit_mle(dag, train)


def compare_models(
    d: Dataset,
    spec: SplitSpec,
    configs: tuple[ModelConfig, ...] | None = None,
    zero_division: ZeroDivision = ZeroDivision.EXCLUDE,
) -> list[CompareRow]:
    """Learn and evaluate every config on one shared split.

    Each config gets an independent RNG stream derived from the split seed
    and its label, so reordering the list does not disturb any row.
    """
    if configs is None:
        configs = default_compare_configs()
    configs = tuple(configs)
    if not configs:
        raise InputError("at least one model configuration required")
    train, test = train_test_split(d, spec)
    title_ids = [v.id for v in d.variables if v.role is Role.TITLE]
    question_ids = [v.id for v in d.variables if v.role is Role.QUESTION]
    if not title_ids or not question_ids:
        raise InputError("dataset needs both title and question variables")
    test_titles = test.records[:, title_ids]
    test_targets = test.records[:, question_ids]
    class_names = [d.variables[q].entity_class for q in question_ids]
    rows = []
    for config in configs:
        bn = learn_model(train, config)
        # Seed material comes from the label so identical configs produce
        # identical rows regardless of their position in the list.
        predictions = predict_dataset(
            bn,
            test_titles,
            config.method,
            config.threshold,
            seed=_derived_seed(spec.seed, zlib.crc32(config.label.encode())),
            n_samples=config.n_samples,
            burn_in=config.burn_in,
        )
        report = evaluate(predictions, test_targets, class_names, zero_division)
        rows.append(CompareRow(config, bn, report))
    return rows


REPORT_COLUMNS = (
    "model",
    "precision_macro",
    "precision_weighted",
    "recall_macro",
    "recall_weighted",
    "f1_macro",
    "f1_weighted",
)


def _report_cells(row: CompareRow) -> list[str]:
    r = row.report
    return [row.config.label] + [
        f"{value:.6f}"
        for value in (
            r.precision_macro,
            r.precision_weighted,
            r.recall_macro,
            r.recall_weighted,
            r.f1_macro,
            r.f1_weighted,
        )
    ]


def compare_report_csv(rows: list[CompareRow]) -> str:
    lines = [",".join(REPORT_COLUMNS)]
    for row in rows:
        lines.append(",".join(_report_cells(row)))
    return "\n".join(lines) + "\n"


def compare_report_text(rows: list[CompareRow]) -> str:
    cells = [list(REPORT_COLUMNS)] + [_report_cells(row) for row in rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(REPORT_COLUMNS))]
    lines = []
    for line in cells:
        lines.append(
            "  ".join(
                cell.ljust(w) if i == 0 else cell.rjust(w)
                for i, (cell, w) in enumerate(zip(line, widths))
            ).rstrip()
        )
    return "\n".join(lines) + "\n"
