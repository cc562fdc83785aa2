"""
ROC curve and trapezoidal AUC
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np

from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float

    def check(self) -> None:
        assert self.fpr[0] == 0.0 and self.tpr[0] == 0.0
        assert self.fpr[-1] == 1.0 and self.tpr[-1] == 1.0
        assert (np.diff(self.fpr) >= 0).all() and (np.diff(self.tpr) >= 0).all()
        assert 0.0 <= self.auc <= 1.0
        assert abs(self.auc - trapezoid_area(self.fpr, self.tpr)) <= 1e-12

    def to_dict(self) -> Dict[str, Any]:
        return {"auc": self.auc, "points": [[float(f), float(t)] for f, t in zip(self.fpr, self.tpr)]}


def trapezoid_area(fpr: np.ndarray, tpr: np.ndarray) -> float:
    """Sum of ((TPR[i+1] + TPR[i]) / 2) * (FPR[i+1] - FPR[i])"""
    return float(np.sum((tpr[1:] + tpr[:-1]) / 2.0 * np.diff(fpr)))


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> RocCurve:
    """
    Sweep one threshold per distinct score, highest first

    Rows with score >= threshold are predicted positive. Tied scores share a
    threshold, so the area equals the pair statistic with ties counted 1/2.

    Args:
        scores: Real score per row (higher means more likely positive)
        labels: Binary label per row

    Returns:
        RocCurve running from (0, 0) to (1, 1)
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(int)
    if scores.shape != labels.shape:
        raise DataError("scores and labels differ in length")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("roc_auc needs both classes present")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    tp = np.cumsum(sorted_labels)
    fp = np.cumsum(1 - sorted_labels)
    # last position of each distinct score
    last = np.r_[np.nonzero(np.diff(sorted_scores))[0], sorted_scores.size - 1]

    tpr = np.r_[0.0, tp[last] / n_pos]
    fpr = np.r_[0.0, fp[last] / n_neg]
    thresholds = np.r_[np.inf, sorted_scores[last]]
    tpr[-1] = 1.0
    fpr[-1] = 1.0
    return RocCurve(fpr, tpr, thresholds, trapezoid_area(fpr, tpr))


def auc_score(scores: Sequence[float], labels: Sequence[int]) -> float:
    return roc_auc(scores, labels).auc
