"""
Complement Naive Bayes feature weights
"""
import logging

import numpy as np

from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)

FORMULA = ("w[c,f] = log((sum_{i not in c} x[i,f] + 1) / (sum_{i not in c} sum_g x[i,g] + d)); "
           "weight[f] = w[1,f] - w[0,f]")


def complement_log_weights(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Complement class log-probabilities with add-one smoothing

    Returns:
        Array of shape (2, d): row c holds w[c, f] computed from the rows NOT in class c
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    if (X < 0).any():
        raise DataError("complement naive Bayes needs nonnegative inputs")
    if len(np.unique(y)) < 2:
        raise DataError("complement naive Bayes needs both classes present")
    d = X.shape[1]
    weights = np.empty((2, d))
    for c in (0, 1):
        complement = X[y != c]
        feature_totals = complement.sum(axis=0)
        weights[c] = np.log((feature_totals + 1.0) / (feature_totals.sum() + d))
    return weights


def fit_complement_nb(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Signed per-feature weight w[1,f] - w[0,f]; its magnitude is the feature weight

    Args:
        X: Nonnegative matrix (normalized features qualify)
        y: Binary labels

    Returns:
        Signed weight per feature
    """
    weights = complement_log_weights(X, y)
    return weights[1] - weights[0]
