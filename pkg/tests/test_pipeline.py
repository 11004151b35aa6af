"""Split, metrics, prediction, and model-comparison pipeline tests."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entbn.core import Dataset, Role, Variable
from entbn.errors import InputError, SplitError
from entbn.inference import InferenceMethod, Query, enumerate_posterior
from entbn.pipeline import (
    REPORT_COLUMNS,
    CompareRow,
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
from entbn.scoring import ScoreKind, ScoreMetric
from entbn.synthetic import generate_synthetic

from helpers import make_variables, network_from_p_one


def constant_dataset(n_rows: int, n_cols: int = 2) -> Dataset:
    return Dataset(
        make_variables(n_cols), np.ones((n_rows, n_cols), dtype=np.uint8)
    )


class TestSplit:
    def test_test_size_is_floor_of_fraction(self):
        train, test = train_test_split(constant_dataset(707), SplitSpec(0.30, 0))
        assert test.n_rows == 212
        assert train.n_rows == 495

    def test_two_rows_half_fraction_gives_one_each(self):
        train, test = train_test_split(constant_dataset(2), SplitSpec(0.5, 0))
        assert (train.n_rows, test.n_rows) == (1, 1)

    def test_partition_is_disjoint_and_exhaustive(self):
        rng = np.random.default_rng(7)
        records = rng.integers(0, 2, size=(50, 4)).astype(np.uint8)
        records[0] = 1  # guarantee every column is coverable
        d = Dataset(make_variables(4), records)
        train, test = train_test_split(d, SplitSpec(0.25, 3))
        merged = np.vstack([train.records, test.records])
        key = lambda m: sorted(map(tuple, m))
        assert key(merged) == key(records)

    def test_rare_class_row_always_lands_in_train(self):
        records = np.ones((10, 3), dtype=np.uint8)
        records[:, 2] = 0
        records[0, 2] = 1  # the only positive for column 2
        d = Dataset(make_variables(3), records)
        for seed in range(20):
            train, test = train_test_split(d, SplitSpec(0.3, seed))
            assert test.records[:, 2].max() == 0
            assert train.records[:, 2].max() == 1

    def test_unachievable_coverage_raises(self):
        d = Dataset(
            make_variables(2), np.array([[1, 0], [0, 1]], dtype=np.uint8)
        )
        with pytest.raises(SplitError):
            train_test_split(d, SplitSpec(0.5, 0))

    def test_repeat_split_is_identical(self):
        d, _ = generate_synthetic(200, seed=5)
        first = train_test_split(d, SplitSpec(0.3, 11))
        second = train_test_split(d, SplitSpec(0.3, 11))
        assert np.array_equal(first[0].records, second[0].records)
        assert np.array_equal(first[1].records, second[1].records)

    def test_tiny_or_invalid_inputs_rejected(self):
        with pytest.raises(InputError):
            train_test_split(constant_dataset(1), SplitSpec(0.5, 0))
        for fraction in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(InputError):
                SplitSpec(fraction, 0)


def worked_example() -> tuple[np.ndarray, np.ndarray]:
    """Two classes, four samples: A has tp=1 fp=1 fn=0, B has tp=1 fp=0 fn=1."""
    targets = np.array([[1, 1], [0, 1], [0, 0], [0, 0]])
    predictions = np.array([[1, 1], [1, 0], [0, 0], [0, 0]])
    return predictions, targets


class TestEvaluate:
    def test_worked_example_counts(self):
        report = evaluate(*worked_example(), class_names=["A", "B"])
        a, b = report.per_class
        assert (a.tp, a.fp, a.fn) == (1, 1, 0)
        assert (b.tp, b.fp, b.fn) == (1, 0, 1)
        assert a.support == 1 and b.support == 2
        assert a.weight == pytest.approx(1 / 3)

    def test_worked_example_macro_and_weighted_precision(self):
        report = evaluate(*worked_example())
        assert report.precision_macro == pytest.approx(0.75, abs=1e-9)
        # 0.5 * 1/3 + 1.0 * 2/3
        assert report.precision_weighted == pytest.approx(0.8333333333, abs=1e-9)
        assert report.recall_macro == pytest.approx(0.75, abs=1e-9)
        assert report.recall_weighted == pytest.approx(2 / 3, abs=1e-9)

    def test_perfect_predictions_score_one(self):
        targets = np.array([[1, 0], [0, 1], [1, 1]])
        report = evaluate(targets, targets)
        for metric in ("precision", "recall", "f1"):
            for kind in ("macro", "weighted"):
                assert report.aggregate(metric, kind) == pytest.approx(1.0)

    def test_undefined_class_excluded_by_default(self):
        preds, targets = worked_example()
        preds = np.hstack([preds, np.zeros((4, 1), dtype=int)])
        targets = np.hstack([targets, np.zeros((4, 1), dtype=int)])
        report = evaluate(preds, targets)
        assert report.per_class[2].precision is None
        assert report.per_class[2].weight == 0.0
        assert report.precision_macro == pytest.approx(0.75, abs=1e-9)
        assert report.precision_weighted == pytest.approx(5 / 6, abs=1e-9)

    def test_zero_policy_counts_undefined_as_zero(self):
        preds, targets = worked_example()
        preds = np.hstack([preds, np.zeros((4, 1), dtype=int)])
        targets = np.hstack([targets, np.zeros((4, 1), dtype=int)])
        report = evaluate(preds, targets, zero_division=ZeroDivision.ZERO)
        assert report.precision_macro == pytest.approx(0.5, abs=1e-9)

    def test_recall_defined_but_zero_when_all_positives_missed(self):
        targets = np.array([[1], [1], [0]])
        preds = np.zeros_like(targets)
        report = evaluate(preds, targets)
        cls = report.per_class[0]
        assert cls.precision is None
        assert cls.recall == 0.0
        assert cls.f1 is None

    def test_input_validation(self):
        with pytest.raises(InputError):
            evaluate(np.zeros((2, 2)), np.zeros((3, 2)))
        with pytest.raises(InputError):
            evaluate(np.full((2, 2), 2), np.zeros((2, 2)))
        with pytest.raises(InputError):
            evaluate(np.zeros((2, 2)), np.zeros((2, 2)), class_names=["only-one"])

    @given(
        st.integers(0, 2**32 - 1),
        st.integers(2, 30),
        st.integers(1, 6),
    )
    @settings(max_examples=40)
    def test_weighted_aggregate_identity(self, seed, n_rows, n_classes):
        rng = np.random.default_rng(seed)
        preds = rng.integers(0, 2, (n_rows, n_classes))
        targets = rng.integers(0, 2, (n_rows, n_classes))
        report = evaluate(preds, targets)
        tp = ((preds == 1) & (targets == 1)).sum(axis=0)
        fp = ((preds == 1) & (targets == 0)).sum(axis=0)
        fn = ((preds == 0) & (targets == 1)).sum(axis=0)
        support = tp + fn
        total = support.sum()
        weights = support / total if total else np.zeros(n_classes)
        prec = np.where(tp + fp > 0, tp / np.maximum(tp + fp, 1), 0.0)
        rec = np.where(support > 0, tp / np.maximum(support, 1), 0.0)
        assert report.precision_weighted == pytest.approx(
            float((prec * weights).sum()), abs=1e-9
        )
        assert report.recall_weighted == pytest.approx(
            float((rec * weights).sum()), abs=1e-9
        )
        defined = tp + fp > 0
        expected_macro = float(prec[defined].mean()) if defined.any() else 0.0
        assert report.precision_macro == pytest.approx(expected_macro, abs=1e-9)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25)
    def test_aggregates_invariant_under_class_permutation(self, seed):
        rng = np.random.default_rng(seed)
        preds = rng.integers(0, 2, (12, 5))
        targets = rng.integers(0, 2, (12, 5))
        perm = rng.permutation(5)
        base = evaluate(preds, targets)
        shuffled = evaluate(preds[:, perm], targets[:, perm])
        for metric in ("precision", "recall", "f1"):
            for kind in ("macro", "weighted"):
                assert base.aggregate(metric, kind) == pytest.approx(
                    shuffled.aggregate(metric, kind), abs=1e-12
                )

    def test_text_report_shows_aggregates_and_placeholders(self):
        preds, targets = worked_example()
        preds = np.hstack([preds, np.zeros((4, 1), dtype=int)])
        targets = np.hstack([targets, np.zeros((4, 1), dtype=int)])
        text = evaluation_text(evaluate(preds, targets, ["A", "B", "C"]))
        assert "precision_macro=0.750000 precision_weighted=0.833333" in text
        assert " - " in text  # undefined metrics render as a dash
        assert text.splitlines()[0].startswith("class")


def mixed_role_network():
    """Three title and three question variables with cross-role edges."""
    roles = [Role.TITLE] * 3 + [Role.QUESTION] * 3
    return network_from_p_one(
        6,
        {(0, 3), (1, 3), (1, 4), (4, 5)},
        {
            0: [0.4],
            1: [0.6],
            2: [0.5],
            3: [0.05, 0.3, 0.6, 0.9],
            4: [0.2, 0.7],
            5: [0.1, 0.8],
        },
        roles,
    )


class TestPrediction:
    def test_probabilities_match_enumeration_for_every_title_vector(self):
        bn = mixed_role_network()
        for bits in range(8):
            vec = [(bits >> k) & 1 for k in range(3)]
            evidence = {i: vec[i] for i in range(3)}
            expected = [
                enumerate_posterior(bn, Query(q, evidence)).p(1) for q in (3, 4, 5)
            ]
            got = question_probabilities(bn, vec)
            assert np.allclose(got, expected, atol=1e-9)

    def test_hard_predictions_threshold_the_probabilities(self):
        bn = mixed_role_network()
        probs = question_probabilities(bn, [1, 0, 1])
        for threshold in (0.2, 0.5, 0.8):
            preds = predict_question_entities(bn, [1, 0, 1], threshold=threshold)
            assert np.array_equal(preds, (probs >= threshold).astype(np.uint8))

    def test_raising_threshold_never_adds_positives(self):
        bn = mixed_role_network()
        low = predict_question_entities(bn, [0, 1, 0], threshold=0.1)
        high = predict_question_entities(bn, [0, 1, 0], threshold=0.9)
        assert np.all(low >= high)

    def test_disconnected_question_uses_its_marginal(self):
        roles = [Role.TITLE, Role.QUESTION]
        bn = network_from_p_one(2, set(), {0: [0.5], 1: [0.9]}, roles)
        for title in ([0], [1]):
            assert predict_question_entities(bn, title)[0] == 1

    def test_impossible_evidence_falls_back_to_prior(self):
        roles = [Role.TITLE, Role.QUESTION]
        bn = network_from_p_one(2, set(), {0: [0.0], 1: [0.9]}, roles)
        probs = question_probabilities(bn, [1])  # title state has zero mass
        assert probs[0] == pytest.approx(0.9, abs=1e-9)

    def test_title_vector_validation(self):
        bn = mixed_role_network()
        with pytest.raises(InputError):
            question_probabilities(bn, [1, 0])
        with pytest.raises(InputError):
            question_probabilities(bn, [2, 0, 0])
        all_title = network_from_p_one(2, set(), {0: [0.5], 1: [0.5]})
        with pytest.raises(InputError):
            question_probabilities(all_title, [1, 1])

    def test_dataset_prediction_matches_per_row_exact_inference(self):
        bn = mixed_role_network()
        rng = np.random.default_rng(0)
        matrix = rng.integers(0, 2, (20, 3)).astype(np.uint8)
        batch = predict_dataset(bn, matrix)
        rows = np.vstack([predict_question_entities(bn, row) for row in matrix])
        assert np.array_equal(batch, rows)

    def test_duplicate_title_rows_share_predictions(self):
        bn = mixed_role_network()
        matrix = np.array([[1, 0, 1], [0, 0, 0], [1, 0, 1]], dtype=np.uint8)
        preds = predict_dataset(
            bn, matrix, InferenceMethod.GIBBS, n_samples=500, burn_in=100, seed=4
        )
        assert np.array_equal(preds[0], preds[2])

    def test_sampling_predictions_are_row_order_invariant(self):
        bn = mixed_role_network()
        rng = np.random.default_rng(1)
        matrix = rng.integers(0, 2, (12, 3)).astype(np.uint8)
        perm = rng.permutation(12)
        kwargs = dict(n_samples=400, burn_in=100, seed=9)
        base = predict_dataset(bn, matrix, InferenceMethod.GIBBS, **kwargs)
        shuffled = predict_dataset(bn, matrix[perm], InferenceMethod.GIBBS, **kwargs)
        assert np.array_equal(base[perm], shuffled)

    def test_empty_matrix_yields_empty_predictions(self):
        bn = mixed_role_network()
        preds = predict_dataset(bn, np.zeros((0, 3), dtype=np.uint8))
        assert preds.shape == (0, 3)


class TestRandomBaseline:
    def test_guess_rates_track_training_marginals(self):
        d, _ = generate_synthetic(4_000, seed=2)
        train, test = train_test_split(d, SplitSpec(0.5, 0))
        guesses = random_baseline_predictions(train, test, seed=3)
        q_ids = [v.id for v in train.variables if v.role is Role.QUESTION]
        rates = train.records[:, q_ids].mean(axis=0)
        assert guesses.shape == (test.n_rows, len(q_ids))
        assert np.all(np.abs(guesses.mean(axis=0) - rates) < 0.06)

    def test_same_seed_reproduces_guesses(self):
        d, _ = generate_synthetic(300, seed=2)
        train, test = train_test_split(d, SplitSpec(0.3, 0))
        a = random_baseline_predictions(train, test, seed=8)
        b = random_baseline_predictions(train, test, seed=8)
        assert np.array_equal(a, b)

    def test_dataset_without_questions_rejected(self):
        d = constant_dataset(5)
        with pytest.raises(InputError):
            random_baseline_predictions(d, d, seed=0)


class TestModelConfig:
    def test_empty_label_rejected(self):
        with pytest.raises(InputError):
            ModelConfig("", Learner.CHOW_LIU)

    def test_hill_climb_requires_metric(self):
        with pytest.raises(InputError):
            ModelConfig("hc", Learner.HILL_CLIMB)

    def test_default_configs_cover_all_learners_and_methods(self):
        configs = default_compare_configs()
        assert [c.label for c in configs] == [
            "hill-climb-bic",
            "hill-climb-bdeu",
            "hill-climb-k2",
            "chow-liu-ve",
            "chow-liu-lw",
            "chow-liu-gs",
            "chow-liu-rs",
        ]
        kinds = [c.metric.kind for c in configs[:3]]
        assert kinds == [ScoreKind.BIC, ScoreKind.BDEU, ScoreKind.K2]
        assert all(c.metric is None for c in configs[3:])
        assert [c.method.value for c in configs] == [
            "ve", "ve", "ve", "ve", "lw", "gibbs", "rs",
        ]


cheap_tree_config = ModelConfig("tree-exact", Learner.CHOW_LIU)


class TestCompare:
    def test_learned_tree_spans_all_variables(self):
        d, _ = generate_synthetic(500, seed=1)
        bn = learn_model(d, cheap_tree_config)
        assert len(bn.dag.edges) == len(d.variables) - 1

    def test_single_config_report_row(self):
        d, _ = generate_synthetic(400, seed=1)
        rows = compare_models(d, SplitSpec(0.3, 0), (cheap_tree_config,))
        assert len(rows) == 1
        assert isinstance(rows[0], CompareRow)
        csv_text = compare_report_csv(rows)
        lines = csv_text.strip().splitlines()
        assert lines[0] == ",".join(REPORT_COLUMNS)
        cells = lines[1].split(",")
        assert cells[0] == "tree-exact"
        assert len(cells) == len(REPORT_COLUMNS)
        for cell in cells[1:]:
            assert 0.0 <= float(cell) <= 1.0

    def test_identical_configs_produce_identical_rows(self):
        d, _ = generate_synthetic(300, seed=6)
        sampler = ModelConfig(
            "tree-lw",
            Learner.CHOW_LIU,
            method=InferenceMethod.LIKELIHOOD_WEIGHTING,
            n_samples=300,
        )
        rows = compare_models(d, SplitSpec(0.3, 2), (sampler, sampler))
        first, second = rows
        for metric in ("precision", "recall", "f1"):
            for kind in ("macro", "weighted"):
                assert first.report.aggregate(metric, kind) == second.report.aggregate(
                    metric, kind
                )

    def test_repeat_run_is_bit_identical(self):
        d, _ = generate_synthetic(300, seed=6)
        configs = (
            cheap_tree_config,
            ModelConfig(
                "tree-gibbs",
                Learner.CHOW_LIU,
                method=InferenceMethod.GIBBS,
                n_samples=200,
                burn_in=50,
            ),
        )
        spec = SplitSpec(0.3, 4)
        first = compare_report_csv(compare_models(d, spec, configs))
        second = compare_report_csv(compare_models(d, spec, configs))
        assert first == second

    def test_empty_config_list_rejected(self):
        d, _ = generate_synthetic(100, seed=0)
        with pytest.raises(InputError):
            compare_models(d, SplitSpec(0.3, 0), ())

    def test_text_report_is_aligned(self):
        d, _ = generate_synthetic(300, seed=6)
        rows = compare_models(d, SplitSpec(0.3, 0), (cheap_tree_config,))
        text = compare_report_text(rows)
        lines = text.strip().splitlines()
        assert lines[0].startswith("model")
        assert len(lines) == 2

    def test_learned_models_beat_random_baseline_over_five_seeds(self):
        configs = (
            ModelConfig("hc-bic", Learner.HILL_CLIMB, metric=ScoreMetric(ScoreKind.BIC)),
            cheap_tree_config,
        )
        for seed in range(5):
            d, _ = generate_synthetic(2_000, seed=seed)
            spec = SplitSpec(0.3, seed)
            rows = compare_models(d, spec, configs)
            train, test = train_test_split(d, spec)
            q_ids = [v.id for v in d.variables if v.role is Role.QUESTION]
            names = [d.variables[q].entity_class for q in q_ids]
            guesses = random_baseline_predictions(train, test, seed)
            baseline = evaluate(guesses, test.records[:, q_ids], names)
            for row in rows:
                assert (
                    row.report.precision_weighted > baseline.precision_weighted
                ), f"seed {seed}: {row.config.label} did not beat the baseline"
