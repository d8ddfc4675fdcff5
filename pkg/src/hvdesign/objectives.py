"""Optimization objectives and candidate evaluation.

Two objectives drive the flip-budget search: maximize the macro-averaged
recall on the training split (wAcc) and minimize the geometric mean of
pairwise class-encoder cosine similarities (avgSim). Robustness is
1 - avgSim. Feasibility is the per-feature row-sum constraint on the
budget; infeasible candidates still get scores (computed on the repaired
budget) but carry feasible=False.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import Dataset, Quantizer
from .errors import DataError, ShapeError
from .hypervector import FlipBudget, build_level_table, encode_quantized, repair_budget
from .model import _similarities_to_encoders, train_encoders

SIMILARITY_CLAMP = 1e-12


@dataclass(frozen=True)
class ObjectiveScores:
    wacc: float
    avg_sim: float
    feasible: bool

    @property
    def robustness(self) -> float:
        return 1.0 - self.avg_sim


def confusion_matrix(true_labels, predicted_labels, n_classes: int) -> np.ndarray:
    """K x K counts, entry [true-1][predicted-1]."""
    t = np.asarray(true_labels, dtype=np.int64)
    p = np.asarray(predicted_labels, dtype=np.int64)
    if t.shape != p.shape:
        raise ShapeError("true and predicted label arrays differ in length")
    out = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(out, (t - 1, p - 1), 1)
    return out


def weighted_accuracy(confusion: np.ndarray) -> float:
    """Macro-averaged recall. Classes with no true samples are dropped from
    the mean with a warning."""
    confusion = np.asarray(confusion, dtype=np.int64)
    totals = confusion.sum(axis=1)
    present = totals > 0
    if not np.all(present):
        missing = (np.flatnonzero(~present) + 1).tolist()
        warnings.warn(f"classes {missing} have no true samples; excluded from wAcc")
    if not np.any(present):
        raise DataError("confusion matrix has no samples at all")
    recalls = np.diag(confusion)[present] / totals[present]
    return float(recalls.mean())


def total_accuracy(confusion: np.ndarray) -> float:
    confusion = np.asarray(confusion, dtype=np.int64)
    total = confusion.sum()
    if total == 0:
        raise DataError("confusion matrix has no samples at all")
    return float(np.trace(confusion) / total)


def pairwise_similarities(encoders: np.ndarray) -> np.ndarray:
    """Raw K x K cosine-similarity matrix between class encoders."""
    encoders = np.asarray(encoders, dtype=np.int64)
    return _similarities_to_encoders(encoders, encoders)


def avg_similarity(encoders: np.ndarray) -> float:
    """Geometric-mean similarity over all ordered encoder pairs k != k',
    with exponent 1/K and each factor clamped below at 1e-12."""
    encoders = np.asarray(encoders, dtype=np.int64)
    k = encoders.shape[0]
    if k < 2:
        raise ValueError(f"need at least 2 class encoders, got {k}")
    sims = pairwise_similarities(encoders)
    off_diag = sims[~np.eye(k, dtype=bool)]
    clamped = np.maximum(off_diag, SIMILARITY_CLAMP)
    return float(np.exp(np.log(clamped).sum() / k))


def feasibility(budget: FlipBudget) -> bool:
    """Row sums within D/2, inclusive."""
    return budget.feasible


class CandidateEvaluator:
    """Evaluates flip budgets against a fixed calibrated training split.

    Quantization levels and class structure are precomputed once; each
    evaluation then only rebuilds the level table and re-runs the
    single-pass pipeline. Pure: identical budgets give identical scores.
    """

    def __init__(self, train: Dataset, quantizer: Quantizer, base_seed):
        if quantizer.features != train.n_features:
            raise ShapeError("quantizer and dataset disagree on feature count")
        self.train = train
        self.quantizer = quantizer
        self.base_seed = int(base_seed)
        self.levels = quantizer.quantize_matrix(train.features)
        self.labels = train.labels
        self.n_classes = train.n_classes

    def evaluate(self, budget: FlipBudget) -> ObjectiveScores:
        if budget.features != self.train.n_features or budget.levels != self.quantizer.levels:
            raise ShapeError(
                f"budget shape ({budget.features}, {budget.levels - 1}) does not match "
                f"dataset N={self.train.n_features}, M={self.quantizer.levels}"
            )
        feasible = budget.feasible
        table = build_level_table(self.base_seed, repair_budget(budget))
        samples = encode_quantized(self.levels, table)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            encoders = train_encoders(samples, self.labels, self.n_classes)
        sims = _similarities_to_encoders(samples, encoders)
        predicted = np.argmax(sims, axis=1) + 1
        confusion = confusion_matrix(self.labels, predicted, self.n_classes)
        return ObjectiveScores(
            wacc=weighted_accuracy(confusion),
            avg_sim=avg_similarity(encoders),
            feasible=feasible,
        )


def evaluate_candidate(
    budget: FlipBudget, train: Dataset, quantizer: Quantizer, base_seed
) -> ObjectiveScores:
    """One-shot form of CandidateEvaluator.evaluate."""
    return CandidateEvaluator(train, quantizer, base_seed).evaluate(budget)
