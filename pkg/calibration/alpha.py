"""
Alpha scaling of calibrated scores on the validation split
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from scoring.scores import ScoreSet, flag_scores, score_matrix
from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)

DEFAULT_ALPHAS = tuple(round(0.5 + 0.1 * i, 1) for i in range(11))


@dataclass(frozen=True)
class AlphaResult:
    alpha: float
    accuracy: float
    sweep: Tuple[Tuple[float, float], ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "accuracy": self.accuracy,
            "sweep": [{"alpha": a, "accuracy": acc} for a, acc in self.sweep],
        }


def scaled_accuracy(scores: np.ndarray, alpha: float, benchmark: float, orientation: int,
                    labels: np.ndarray) -> float:
    """Delineation accuracy of alpha * scores against a fixed benchmark"""
    flags = flag_scores(alpha * scores, benchmark, orientation)
    return float(np.mean(flags == labels))


def alpha_tune(train_scores: ScoreSet, normalized_val: np.ndarray, weights: Sequence[float],
               labels_val: Sequence[int], alphas: Optional[Sequence[float]] = None) -> AlphaResult:
    """
    Pick the score multiplier that maximizes validation delineation accuracy

    Validation scores are alpha * (weighted mean of normalized features) and are
    flagged against the training benchmark and orientation, which stay fixed.

    Args:
        train_scores: Unscaled training ScoreSet (supplies benchmark and orientation)
        normalized_val: Normalized validation matrix
        weights: Calibrated weights
        labels_val: Validation labels
        alphas: Candidate multipliers (default 0.5, 0.6, ..., 1.5)

    Returns:
        AlphaResult; ties go to the smallest alpha
    """
    X = np.asarray(normalized_val, dtype=float)
    labels = np.asarray(labels_val).astype(int)
    if X.shape[0] == 0:
        raise DataError("alpha_tune needs a nonempty validation set")
    if labels.size != X.shape[0]:
        raise DataError("validation labels and rows differ in length")
    alphas = sorted(DEFAULT_ALPHAS if alphas is None else alphas)
    if not alphas or alphas[0] <= 0:
        raise DataError("alpha grid must be nonempty and positive")

    scores = score_matrix(X, np.asarray(weights, dtype=float))
    sweep: List[Tuple[float, float]] = []
    best_alpha, best_acc = alphas[0], -1.0
    for alpha in alphas:
        acc = scaled_accuracy(scores, alpha, train_scores.benchmark, train_scores.orientation, labels)
        sweep.append((alpha, acc))
        if acc > best_acc:
            best_alpha, best_acc = alpha, acc
    logger.info(f"Alpha tuning: alpha={best_alpha} gives validation delineation accuracy {best_acc:.4f}")
    return AlphaResult(best_alpha, best_acc, tuple(sweep))
