import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hvdesign import (
    CandidateEvaluator,
    FlipBudget,
    ShapeError,
    avg_similarity,
    calibrate_quantizer,
    confusion_matrix,
    cosine_similarity,
    evaluate_candidate,
    feasibility,
    fit_baseline,
    pairwise_similarities,
    predict_batch,
    uniform_flip_budget,
    weighted_accuracy,
)

CLAMP = 1e-12


def reference_wacc(confusion):
    """Independent per-class-recall oracle."""
    recalls = []
    for k in range(confusion.shape[0]):
        total = confusion[k].sum()
        if total:
            recalls.append(confusion[k, k] / total)
    return sum(recalls) / len(recalls)


def reference_avg_sim(encoders):
    """Direct evaluation of the ordered-pair product form with clamp."""
    k = len(encoders)
    product = 1.0
    for i, j in itertools.product(range(k), range(k)):
        if i != j:
            product *= max(cosine_similarity(encoders[i], encoders[j]), CLAMP)
    return product ** (1.0 / k)


class TestWeightedAccuracy:
    def test_perfect_diagonal(self):
        assert weighted_accuracy(np.diag([5, 3, 9])) == 1.0

    def test_two_class_arithmetic(self):
        confusion = np.array([[4, 0], [2, 2]])
        assert weighted_accuracy(confusion) == pytest.approx(0.75)

    def test_everything_predicted_class_one(self):
        confusion = np.array([[10, 0], [10, 0]])
        assert weighted_accuracy(confusion) == pytest.approx(0.5)

    def test_empty_class_excluded_with_warning(self):
        confusion = np.array([[4, 0], [0, 0]])
        with pytest.warns(UserWarning, match=r"\[2\]"):
            assert weighted_accuracy(confusion) == 1.0

    def test_relabeling_invariant(self):
        rng = np.random.default_rng(4)
        confusion = rng.integers(1, 20, size=(4, 4))
        perm = rng.permutation(4)
        permuted = confusion[np.ix_(perm, perm)]
        assert weighted_accuracy(permuted) == pytest.approx(weighted_accuracy(confusion))

    def test_matches_oracle_on_random_matrices(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            k = rng.integers(2, 6)
            confusion = rng.integers(0, 30, size=(k, k))
            confusion[np.arange(k), np.arange(k)] += 1  # every class present
            assert weighted_accuracy(confusion) == pytest.approx(
                reference_wacc(confusion), abs=1e-12
            )


class TestAvgSimilarity:
    def test_identical_encoders(self):
        encoders = np.array([[1, -1, 1, 1], [1, -1, 1, 1]])
        assert avg_similarity(encoders) == pytest.approx(1.0)

    def test_pairwise_half(self):
        # cosine([1,1,0,0], [1,0,1,0]) = 1/2; (0.5 * 0.5)^(1/2) = 0.5.
        encoders = np.array([[1, 1, 0, 0], [1, 0, 1, 0]])
        assert pairwise_similarities(encoders)[0, 1] == pytest.approx(0.5)
        assert avg_similarity(encoders) == pytest.approx(0.5)

    def test_orthogonal_clamped(self):
        encoders = np.array([[1, 1, 0, 0], [0, 0, 1, 1]])
        # exp(log(...)) introduces one ulp of slack around the clamp floor
        assert 0 < avg_similarity(encoders) <= 1e-12 * (1 + 1e-9)

    def test_single_encoder_rejected(self):
        with pytest.raises(ValueError):
            avg_similarity(np.array([[1, 2, 3]]))

    def test_scaling_invariant(self):
        rng = np.random.default_rng(2)
        encoders = rng.integers(-4, 5, size=(3, 16))
        scaled = encoders.copy()
        scaled[1] *= 9
        assert avg_similarity(scaled) == pytest.approx(avg_similarity(encoders))

    def test_matches_oracle_on_random_encoders(self):
        rng = np.random.default_rng(123)
        for _ in range(100):
            k = rng.integers(2, 5)
            encoders = rng.integers(-6, 7, size=(k, 24))
            assert avg_similarity(encoders) == pytest.approx(
                reference_avg_sim(encoders), rel=1e-12, abs=1e-12
            )


class TestFeasibility:
    def test_below_limit(self):
        assert feasibility(FlipBudget(budgets=np.array([[3, 3]]), dim=16))

    def test_exactly_at_limit(self):
        assert feasibility(FlipBudget(budgets=np.array([[4, 4]]), dim=16))

    def test_one_over(self):
        assert not feasibility(FlipBudget(budgets=np.array([[4, 5]]), dim=16))


class TestEvaluateCandidate:
    def test_uniform_budget_matches_baseline_pipeline(self, toy_dataset):
        quantizer = calibrate_quantizer(toy_dataset, 5)
        scores = evaluate_candidate(
            uniform_flip_budget(64, 5, features=2), toy_dataset, quantizer, 7
        )
        model = fit_baseline(toy_dataset, 64, 5, seed=7)
        predicted = predict_batch(toy_dataset.features, model)
        confusion = confusion_matrix(toy_dataset.labels, predicted, 3)
        assert scores.wacc == pytest.approx(weighted_accuracy(confusion))
        assert scores.avg_sim == pytest.approx(avg_similarity(model.encoders))
        assert scores.feasible

    def test_infeasible_flagged_but_scored(self, toy_dataset):
        quantizer = calibrate_quantizer(toy_dataset, 5)
        budget = FlipBudget(budgets=np.full((2, 4), 30), dim=64)
        scores = evaluate_candidate(budget, toy_dataset, quantizer, 7)
        assert not scores.feasible
        assert 0.0 <= scores.wacc <= 1.0
        assert 0.0 < scores.avg_sim <= 1.0

    def test_pure_bit_identical(self, micro_dataset, micro_quantizer):
        evaluator = CandidateEvaluator(micro_dataset, micro_quantizer, 42)
        budget = FlipBudget(budgets=np.array([[3, 5]]), dim=16)
        a, b = evaluator.evaluate(budget), evaluator.evaluate(budget)
        assert a == b

    def test_shape_mismatch_rejected(self, micro_dataset, micro_quantizer):
        evaluator = CandidateEvaluator(micro_dataset, micro_quantizer, 0)
        with pytest.raises(ShapeError):
            evaluator.evaluate(FlipBudget(budgets=np.array([[3, 5], [1, 1]]), dim=16))

    def test_robustness_complements_avg_sim(self, micro_dataset, micro_quantizer):
        evaluator = CandidateEvaluator(micro_dataset, micro_quantizer, 0)
        scores = evaluator.evaluate(FlipBudget(budgets=np.array([[2, 2]]), dim=16))
        assert scores.robustness + scores.avg_sim == 1.0

    def test_micro_problem_best_wacc_matches_enumeration(
        self, micro_dataset, micro_quantizer
    ):
        evaluator = CandidateEvaluator(micro_dataset, micro_quantizer, 123)
        best = max(
            evaluator.evaluate(FlipBudget(budgets=np.array([[b1, b2]]), dim=16)).wacc
            for b1 in range(9)
            for b2 in range(9)
            if b1 + b2 <= 8
        )
        # Frozen from the exhaustive enumeration over all feasible pairs.
        assert best == pytest.approx(0.7857142857142857)

    @given(st.integers(0, 8), st.integers(0, 8))
    @settings(max_examples=30, deadline=None)
    def test_score_ranges(self, micro_dataset, micro_quantizer, b1, b2):
        evaluator = CandidateEvaluator(micro_dataset, micro_quantizer, 1)
        scores = evaluator.evaluate(FlipBudget(budgets=np.array([[b1, b2]]), dim=16))
        assert 0.0 <= scores.wacc <= 1.0
        assert 0.0 < scores.avg_sim <= 1.0
