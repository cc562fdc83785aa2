"""
Confusion matrix and threshold metrics
"""
import logging
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


def confusion(pred: Sequence[int], labels: Sequence[int]) -> ConfusionMatrix:
    pred = np.asarray(pred).astype(int)
    labels = np.asarray(labels).astype(int)
    if pred.shape != labels.shape:
        raise DataError("predictions and labels differ in length")
    return ConfusionMatrix(
        tp=int(np.sum((pred == 1) & (labels == 1))),
        tn=int(np.sum((pred == 0) & (labels == 0))),
        fp=int(np.sum((pred == 1) & (labels == 0))),
        fn=int(np.sum((pred == 0) & (labels == 1))),
    )


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def classification_metrics(cm: ConfusionMatrix) -> Dict[str, Optional[float]]:
    """
    Accuracy, precision (PPV), recall (TPR), NPV, specificity and FPR

    Ratios with a zero denominator are reported as None rather than 0.

    Args:
        cm: Confusion matrix with at least one row

    Returns:
        Metric name -> value
    """
    if cm.total == 0:
        raise DataError("metrics of an empty confusion matrix")
    return {
        "accuracy": (cm.tp + cm.tn) / cm.total,
        "precision": _ratio(cm.tp, cm.tp + cm.fp),
        "recall": _ratio(cm.tp, cm.tp + cm.fn),
        "npv": _ratio(cm.tn, cm.tn + cm.fn),
        "specificity": _ratio(cm.tn, cm.tn + cm.fp),
        "fpr": _ratio(cm.fp, cm.fp + cm.tn),
    }


def threshold_predictions(scores: Sequence[float], threshold: float = 0.5) -> np.ndarray:
    return (np.asarray(scores, dtype=float) >= threshold).astype(int)
