"""
SXI++ scores, benchmark, flags and bivariate correlation weights
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from scoring.normalization import pearson
from tabular.data import DataTable
from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)

WeightVector = Union[Sequence[float], np.ndarray, Dict[str, float]]


@dataclass(frozen=True)
class BivariateWeights:
    features: tuple
    weights: np.ndarray

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.features, self.weights.tolist()))


@dataclass(frozen=True)
class ScoreSet:
    """
    Per-row scores with their benchmark (mean) and benchmark flags

    flags[i] = 1 iff orientation * (scores[i] - benchmark) >= 0.
    """
    scores: np.ndarray
    benchmark: float
    flags: np.ndarray
    orientation: int
    delineation_accuracy: Optional[float] = None

    def check(self, labels: Optional[Sequence[int]] = None) -> None:
        """Re-assert the invariants from the fields alone"""
        assert self.orientation in (1, -1)
        if self.scores.size:
            assert abs(self.benchmark - float(np.mean(self.scores))) <= 1e-12 * max(1.0, abs(self.benchmark))
        expected = (self.orientation * (self.scores - self.benchmark) >= 0).astype(int)
        assert np.array_equal(expected, self.flags)
        if self.delineation_accuracy is not None:
            assert 0.0 <= self.delineation_accuracy <= 1.0
            if labels is not None:
                assert self.delineation_accuracy == float(np.mean(self.flags == np.asarray(labels)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "benchmark": self.benchmark,
            "orientation": self.orientation,
            "delineation_accuracy": self.delineation_accuracy,
            "n_rows": int(self.scores.size),
        }


@dataclass(frozen=True)
class BenchmarkView:
    """
    Scores of new rows flagged against a benchmark fixed on the training rows

    Unlike ScoreSet the benchmark is not the mean of these scores.
    """
    scores: np.ndarray
    benchmark: float
    flags: np.ndarray
    orientation: int
    delineation_accuracy: Optional[float] = None
    benchmark_source: str = "training"

    def check(self) -> None:
        assert self.orientation in (1, -1)
        assert np.array_equal(flag_scores(self.scores, self.benchmark, self.orientation), self.flags)


def benchmark_view(scores: np.ndarray, benchmark: float, orientation: int,
                   labels: Optional[Sequence[int]] = None) -> BenchmarkView:
    """Flag scores against a given benchmark and orientation"""
    scores = np.asarray(scores, dtype=float)
    flags = flag_scores(scores, benchmark, orientation)
    accuracy = None
    if labels is not None:
        labels = np.asarray(labels).astype(int)
        if labels.shape != scores.shape:
            raise DataError("labels and scores differ in length")
        accuracy = float(np.mean(flags == labels))
    return BenchmarkView(scores, float(benchmark), flags, orientation, accuracy)


def correlation_matrix(X: np.ndarray) -> np.ndarray:
    """Pearson correlation matrix; constant columns correlate 0 with everything (1 on the diagonal)"""
    X = np.asarray(X, dtype=float)
    d = X.shape[1]
    centered = X - X.mean(axis=0)
    norms = np.sqrt((centered ** 2).sum(axis=0))
    safe = np.where(norms > 0, norms, 1.0)
    corr = (centered.T @ centered) / np.outer(safe, safe)
    constant = norms == 0
    corr[constant, :] = 0.0
    corr[:, constant] = 0.0
    corr = np.clip(corr, -1.0, 1.0)
    corr[np.arange(d), np.arange(d)] = 1.0
    return corr


def bivariate_weights(normalized_train: DataTable, features: Optional[Sequence[str]] = None) -> BivariateWeights:
    """
    Mean absolute correlation of each feature with every other feature

    Args:
        normalized_train: Imputed (normally normalized) training table
        features: Feature columns to use (defaults to all features; target excluded)

    Returns:
        BivariateWeights; a single-feature table gets weight 1
    """
    features = tuple(normalized_train.feature_names if features is None else features)
    if not features:
        raise DataError("bivariate_weights needs at least one feature")
    X = normalized_train.matrix(features)
    d = len(features)
    if d == 1:
        return BivariateWeights(features, np.ones(1))
    corr = np.abs(correlation_matrix(X))
    weights = (corr.sum(axis=1) - np.diag(corr)) / (d - 1)
    return BivariateWeights(features, weights)


def _weight_array(weights: WeightVector, features: Sequence[str]) -> np.ndarray:
    if isinstance(weights, dict):
        missing = [f for f in features if f not in weights]
        if missing:
            raise DataError(f"weights missing for features {missing}")
        w = np.array([weights[f] for f in features], dtype=float)
    else:
        w = np.asarray(weights, dtype=float)
    if w.shape != (len(features),):
        raise DataError(f"weight vector has {w.size} entries for {len(features)} features")
    if (w < 0).any():
        raise DataError("weights must be nonnegative")
    if not w.any():
        raise DataError("all-zero weights")
    return w


def score_matrix(X: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Weighted mean of normalized features per row"""
    weights = np.asarray(weights, dtype=float)
    return (np.asarray(X, dtype=float) @ weights) / weights.sum()


def benchmark_of(scores: np.ndarray) -> float:
    """Arithmetic mean, pinned to the common value when all scores are equal"""
    if scores.size == 0:
        raise DataError("benchmark of an empty score vector")
    if np.ptp(scores) == 0:
        return float(scores[0])
    return math.fsum(scores.tolist()) / scores.size


def orientation_of(scores: np.ndarray, labels: Optional[Sequence[int]]) -> int:
    if labels is None:
        return 1
    return -1 if pearson(scores, labels) < 0 else 1


def flag_scores(scores: np.ndarray, benchmark: float, orientation: int) -> np.ndarray:
    return (orientation * (np.asarray(scores) - benchmark) >= 0).astype(int)


def scoreset_from_scores(scores: np.ndarray, labels: Optional[Sequence[int]] = None) -> ScoreSet:
    """Benchmark, orientation, flags and delineation accuracy for given scores"""
    scores = np.asarray(scores, dtype=float)
    benchmark = benchmark_of(scores)
    orientation = orientation_of(scores, labels)
    flags = flag_scores(scores, benchmark, orientation)
    accuracy = None
    if labels is not None:
        labels = np.asarray(labels).astype(int)
        if labels.shape != scores.shape:
            raise DataError("labels and scores differ in length")
        accuracy = float(np.mean(flags == labels))
    return ScoreSet(scores, benchmark, flags, orientation, accuracy)


def compute_scores(normalized: DataTable, weights: WeightVector, labels: Optional[Sequence[int]] = None,
                   features: Optional[Sequence[str]] = None) -> ScoreSet:
    """
    SXI++ score per row: weighted mean of the normalized features

    Args:
        normalized: Normalized table
        weights: Nonnegative weights aligned with `features` (or a name -> weight dict)
        labels: Optional labels; when given, orientation and delineation accuracy are set
        features: Modeled features (defaults to the table's feature columns)

    Returns:
        ScoreSet
    """
    features = list(normalized.feature_names if features is None else features)
    w = _weight_array(weights, features)
    scores = score_matrix(normalized.matrix(features), w)
    return scoreset_from_scores(scores, labels)


def benchmark_report(scores: ScoreSet, labels: Sequence[int]) -> Dict[str, Any]:
    """
    Distribution of outcomes around the benchmark score

    Args:
        scores: ScoreSet of the rows
        labels: Binary outcome per row

    Returns:
        Machine-readable summary (see scoring.formatter for the text rendering)
    """
    labels = np.asarray(labels).astype(int)
    n = labels.size
    if n == 0 or n != scores.scores.size:
        raise DataError("benchmark_report needs one label per scored row")
    above = scores.scores >= scores.benchmark
    n_pos = int(labels.sum())

    def group(mask: np.ndarray) -> Dict[str, Any]:
        size = int(mask.sum())
        positives = int(labels[mask].sum())
        negatives = size - positives
        return {
            "rows": size,
            "positive": positives,
            "negative": negatives,
            "purity": max(positives, negatives) / size if size else None,
        }

    return {
        "benchmark": scores.benchmark,
        "orientation": scores.orientation,
        "n_rows": n,
        "pct_positive": 100.0 * n_pos / n,
        "pct_negative": 100.0 * (n - n_pos) / n,
        "at_or_above_benchmark": group(above),
        "below_benchmark": group(~above),
        "flagged": int(scores.flags.sum()),
        "delineation_accuracy": scores.delineation_accuracy,
    }
