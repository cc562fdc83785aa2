"""
Evaluation report assembly
Point estimates with bootstrap intervals for one labeled dataset
"""
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from evaluation.bootstrap import bootstrap_ci
from evaluation.metrics import classification_metrics, confusion, threshold_predictions
from evaluation.roc import roc_auc

# Configure logging
logger = logging.getLogger(__name__)

PROBABILITY_THRESHOLD = 0.5

# (key, row label) in table order
METRIC_ROWS = [
    ("accuracy", "Accuracy"),
    ("precision", "Precision (PPV)"),
    ("recall", "Recall"),
    ("npv", "NPV"),
    ("specificity", "Specificity"),
    ("fpr", "FPR"),
    ("auc", "AUC"),
]


def _threshold_metric(name: str) -> Callable[[np.ndarray, np.ndarray], Optional[float]]:
    def metric(pred: np.ndarray, labels: np.ndarray) -> Optional[float]:
        return classification_metrics(confusion(pred, labels))[name]
    return metric


def _auc_metric(scores: np.ndarray, labels: np.ndarray) -> float:
    return roc_auc(scores, labels).auc


def _has_both_classes(labels: np.ndarray) -> bool:
    return 0 < int(labels.sum()) < labels.size


def metric_rows(probabilities: Sequence[float], labels: Sequence[int], n_boot: int = 1000, level: float = 0.95,
                seed: int = 0, workers: int = 1) -> List[Dict[str, Any]]:
    """
    One row per metric: point estimate plus percentile bootstrap bounds

    Threshold metrics use probability >= 0.5. AUC is absent when the labels
    hold a single class.
    """
    probabilities = np.asarray(probabilities, dtype=float)
    labels = np.asarray(labels).astype(int)
    predictions = threshold_predictions(probabilities, PROBABILITY_THRESHOLD)
    points = classification_metrics(confusion(predictions, labels))
    both = _has_both_classes(labels)
    points["auc"] = roc_auc(probabilities, labels).auc if both else None

    rows = []
    for offset, (key, label) in enumerate(METRIC_ROWS):
        point = points[key]
        low = high = None
        if point is not None:
            if key == "auc":
                low, high = bootstrap_ci(_auc_metric, probabilities, labels, n_boot, level, seed + offset, workers)
            else:
                low, high = bootstrap_ci(_threshold_metric(key), predictions, labels, n_boot, level,
                                         seed + offset, workers)
        rows.append({"metric": key, "label": label, "point": point, "low": low, "high": high})
    return rows


def evaluate_dataset(probabilities: Sequence[float], sxi_scores: Sequence[float], flags: Sequence[int],
                     labels: Sequence[int], descriptor: Dict[str, Any], orientation: int = 1, n_boot: int = 1000,
                     level: float = 0.95, seed: int = 0, workers: int = 1) -> Dict[str, Any]:
    """
    Full evaluation block for one dataset

    Args:
        probabilities: Final classifier probabilities
        sxi_scores: Alpha-scaled SXI++ scores
        flags: Benchmark flags
        labels: True labels
        descriptor: Row count and class mix of the dataset
        orientation: Sign that makes higher scores mean class 1
        n_boot: Bootstrap resamples
        level: Interval coverage
        seed: Bootstrap seed
        workers: Threads for resampling

    Returns:
        Dict with the metric rows, the confusion matrix and SXI++ score diagnostics
    """
    labels = np.asarray(labels).astype(int)
    sxi_scores = np.asarray(sxi_scores, dtype=float)
    predictions = threshold_predictions(probabilities, PROBABILITY_THRESHOLD)
    cm = confusion(predictions, labels)
    both = _has_both_classes(labels)
    if not both:
        logger.warning(f"Dataset {descriptor} holds a single class; AUC is undefined")
    return {
        "dataset": descriptor,
        "confusion": cm.to_dict(),
        "rows": metric_rows(probabilities, labels, n_boot, level, seed, workers),
        "sxi": {
            "auc": roc_auc(orientation * sxi_scores, labels).auc if both else None,
            "delineation_accuracy": float(np.mean(np.asarray(flags).astype(int) == labels)),
        },
    }
