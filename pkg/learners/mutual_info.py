"""
Histogram mutual information between each feature and a binary target
"""
import logging

import numpy as np

from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)


def bin_feature(values: np.ndarray, bins: int) -> np.ndarray:
    """Equal-width bin index over the observed range; a constant column falls in one bin"""
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return np.zeros(values.size, dtype=int)
    edges = np.linspace(lo, hi, bins + 1)
    return np.clip(np.searchsorted(edges, values, side="right") - 1, 0, bins - 1)


def mutual_information(X: np.ndarray, y: np.ndarray, bins: int = 10) -> np.ndarray:
    """
    Mutual information (nats) of every column of X with y

    Args:
        X: Feature matrix (n, d)
        y: Binary labels
        bins: Number of equal-width bins, at least 2

    Returns:
        Nonnegative MI per feature
    """
    if bins < 2:
        raise DataError(f"bins must be >= 2, got {bins}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    n, d = X.shape
    if n == 0:
        raise DataError("mutual_information of an empty matrix")
    p_c = np.bincount(y, minlength=2) / n
    mi = np.zeros(d)
    for j in range(d):
        b = bin_feature(X[:, j], bins)
        joint = np.zeros((bins, 2))
        np.add.at(joint, (b, y), 1.0)
        joint /= n
        p_b = joint.sum(axis=1)
        nz = joint > 0
        ratio = joint[nz] / (p_b[:, None] * p_c[None, :])[nz]
        mi[j] = max(float(np.sum(joint[nz] * np.log(ratio))), 0.0)
    return mi
