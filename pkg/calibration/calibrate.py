"""
Iterative weight calibration
Greedy per-feature multiplier sweeps that raise delineation accuracy, with regeneration from refined weights
"""
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from scoring.scores import scoreset_from_scores, score_matrix
from utils.errors import ConfigError, DataError

# Configure logging
logger = logging.getLogger(__name__)

TOP_K = 5
REGEN = "regen"


@dataclass(frozen=True)
class CalibrationConfig:
    grid_step: float = 0.05
    extended_step: float = 0.25
    max_outer_iterations: int = 10
    max_regens: int = 3

    def __post_init__(self):
        if not 0 < self.grid_step <= 1 or self.extended_step <= 0:
            raise ConfigError(f"invalid calibration steps in {self}")
        if self.max_outer_iterations < 0 or self.max_regens < 0:
            raise ConfigError(f"invalid calibration limits in {self}")

    @property
    def positive_grid(self) -> List[float]:
        """Multipliers 1 + step .. 2.00 (the +0% .. +100% sweep without the identity)"""
        steps = int(round(1.0 / self.grid_step))
        return [round(1.0 + self.grid_step * i, 6) for i in range(1, steps + 1)]

    @property
    def negative_grid(self) -> List[float]:
        """Multipliers 1 - step .. 0.00"""
        steps = int(round(1.0 / self.grid_step))
        return [max(round(1.0 - self.grid_step * i, 6), 0.0) for i in range(1, steps + 1)]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class CalibrationState:
    current_weights: np.ndarray
    current_accuracy: float
    baseline_accuracy: float
    history: List[Dict[str, Any]] = field(default_factory=list)
    regen_count: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weights": self.current_weights.tolist(),
            "accuracy": self.current_accuracy,
            "baseline_accuracy": self.baseline_accuracy,
            "history": list(self.history),
            "regen_count": self.regen_count,
        }


def delineation_accuracy(X: np.ndarray, weights: np.ndarray, labels: np.ndarray) -> float:
    return scoreset_from_scores(score_matrix(X, weights), labels).delineation_accuracy


def sweep_accuracies(X: np.ndarray, weights: np.ndarray, labels: np.ndarray, feature: int,
                     multipliers: Sequence[float]) -> np.ndarray:
    """
    Delineation accuracy for every multiplier of one feature weight at once

    Approximates the canonical evaluation to float rounding; candidates are
    re-checked with delineation_accuracy before they are accepted.
    """
    multipliers = np.asarray(multipliers, dtype=float)
    base = X @ weights
    total = weights.sum()
    delta = (multipliers - 1.0) * weights[feature]
    denom = total + delta
    valid = denom > 0
    S = (base[:, None] + X[:, [feature]] * delta[None, :]) / np.where(valid, denom, 1.0)[None, :]
    centered = S - S.mean(axis=0)
    y_centered = labels - labels.mean()
    orientation = np.where(centered.T @ y_centered < 0, -1.0, 1.0)
    flags = (orientation[None, :] * centered >= 0).astype(int)
    acc = (flags == labels[:, None]).mean(axis=0)
    return np.where(valid, acc, -1.0)


def _try_feature(X: np.ndarray, weights: np.ndarray, labels: np.ndarray, feature: int, grid: Sequence[float],
                 current: float) -> Optional[Tuple[float, float]]:
    """Best strictly improving multiplier on the grid as (multiplier, accuracy), or None"""
    approx = sweep_accuracies(X, weights, labels, feature, grid)
    # the sweep can be off by one row, so near misses still get the exact check
    slack = 1.0 / labels.size
    order = np.argsort(-approx, kind="stable")
    for idx in order:
        if approx[idx] < current - slack:
            break
        trial = weights.copy()
        trial[feature] *= grid[idx]
        if not trial.any():
            continue
        acc = delineation_accuracy(X, trial, labels)
        if acc > current:
            return float(grid[idx]), acc
    return None


def _pass(X: np.ndarray, weights: np.ndarray, labels: np.ndarray, accuracy: float, grid: Sequence[float],
          extend: float, iteration: int, history: List[Dict[str, Any]]) -> Tuple[np.ndarray, float, bool]:
    changed = False
    order = np.argsort(-weights, kind="stable")
    for feature in order:
        if weights[feature] == 0:
            continue
        found = _try_feature(X, weights, labels, int(feature), grid, accuracy)
        if found is None:
            continue
        multiplier, new_acc = found
        if extend > 0 and multiplier == grid[-1]:
            # keep stretching past the end of the grid while it helps
            while True:
                candidate = round(multiplier + extend, 6)
                trial = weights.copy()
                trial[feature] *= candidate
                acc = delineation_accuracy(X, trial, labels)
                if acc <= new_acc:
                    break
                multiplier, new_acc = candidate, acc
        weights = weights.copy()
        weights[feature] *= multiplier
        accuracy = new_acc
        changed = True
        history.append({"iteration": iteration, "target": int(feature), "multiplier": multiplier,
                        "accuracy": accuracy})
        logger.debug(f"Calibration iteration {iteration}: feature {feature} x{multiplier} -> {accuracy:.4f}")
    return weights, accuracy, changed


def regenerate(refined_weights: Sequence[float], importance_counts: Sequence[float]) -> np.ndarray:
    """Refined weights with the top five (by refined weight) scaled by their importance counts"""
    refined = np.asarray(refined_weights, dtype=float)
    counts = np.asarray(importance_counts, dtype=float)
    boosted = refined.copy()
    top = np.argsort(-refined, kind="stable")[:TOP_K]
    boosted[top] *= counts[top]
    total = boosted.sum()
    return boosted / total if total > 0 else np.full(refined.size, 1.0 / refined.size)


def calibrate(weights: Sequence[float], normalized_train: np.ndarray, labels: Sequence[int],
              refined_weights: Sequence[float], config: Optional[CalibrationConfig] = None,
              importance_counts: Optional[Sequence[float]] = None, feature_names: Optional[Sequence[str]] = None
              ) -> CalibrationState:
    """
    Greedy multiplicative calibration of the feature weights

    Each outer iteration sweeps the positive grid over every feature (largest
    weight first); if nothing improves it sweeps the negative grid; if that
    fails too the weights are regenerated from the refined network weights.
    Only strictly improving steps are accepted and the best weights seen are
    returned, so the final accuracy is never below the baseline.

    Args:
        weights: Starting nonnegative weights (composite weights)
        normalized_train: Normalized training matrix (n, d)
        labels: Binary training labels
        refined_weights: Per-feature weights from the network
        config: Grids and iteration limits
        importance_counts: Top-5 frequency counts (all ones when omitted)
        feature_names: Used only to label history rows

    Returns:
        CalibrationState with the best weights and the accepted-step history
    """
    config = config or CalibrationConfig()
    X = np.asarray(normalized_train, dtype=float)
    y = np.asarray(labels).astype(int)
    w = np.asarray(weights, dtype=float)
    if X.ndim != 2 or X.shape != (y.size, w.size):
        raise DataError("calibrate needs X of shape (len(labels), len(weights))")
    if (w < 0).any() or not w.any():
        raise DataError("calibration weights must be nonnegative and not all zero")
    refined = np.asarray(refined_weights, dtype=float)
    counts = np.ones(w.size) if importance_counts is None else np.asarray(importance_counts, dtype=float)
    if refined.shape != w.shape or counts.shape != w.shape:
        raise DataError("refined weights and importance counts must match the weight vector")

    accuracy = delineation_accuracy(X, w, y)
    state = CalibrationState(w.copy(), accuracy, accuracy)
    if y.min() == y.max() or accuracy >= 1.0:
        logger.info(f"Calibration skipped: baseline accuracy {accuracy:.4f} cannot improve")
        return state

    history: List[Dict[str, Any]] = []
    best_w, best_acc = w.copy(), accuracy
    regens = 0
    for iteration in range(1, config.max_outer_iterations + 1):
        w, accuracy, changed = _pass(X, w, y, accuracy, config.positive_grid, config.extended_step,
                                     iteration, history)
        if not changed:
            w, accuracy, changed = _pass(X, w, y, accuracy, config.negative_grid, 0.0, iteration, history)
        if accuracy > best_acc:
            best_w, best_acc = w.copy(), accuracy
        if best_acc >= 1.0:
            break
        if changed:
            continue
        if regens >= config.max_regens:
            break
        regenerated = regenerate(refined, counts)
        if np.array_equal(regenerated, w):
            break
        regens += 1
        w = regenerated
        accuracy = delineation_accuracy(X, w, y)
        history.append({"iteration": iteration, "target": REGEN, "multiplier": None, "accuracy": accuracy})
        logger.debug(f"Calibration iteration {iteration}: regenerated weights -> {accuracy:.4f}")
        if accuracy > best_acc:
            best_w, best_acc = w.copy(), accuracy

    if feature_names is not None:
        for row in history:
            if row["target"] != REGEN:
                row["target"] = feature_names[row["target"]]
    state.current_weights = best_w
    state.current_accuracy = best_acc
    state.history = history
    state.regen_count = regens
    logger.info(f"Calibration: accuracy {state.baseline_accuracy:.4f} -> {best_acc:.4f} "
                f"({len(history)} steps, {regens} regenerations)")
    return state
