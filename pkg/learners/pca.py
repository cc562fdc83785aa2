"""
Principal component analysis of the feature covariance matrix
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PcaResult:
    loadings: np.ndarray  # columns are components
    explained_variance: np.ndarray

    @property
    def first_loading(self) -> np.ndarray:
        return self.loadings[:, 0]

    def feature_weights(self) -> np.ndarray:
        """|loading| on the first principal component; zeros when there is no variance"""
        if self.explained_variance.size == 0 or self.explained_variance[0] <= 0:
            return np.zeros(self.loadings.shape[0])
        return np.abs(self.first_loading)


def fit_pca(X: np.ndarray) -> PcaResult:
    """
    Eigen-decomposition of the covariance of centered X

    Eigenvalues are returned in non-increasing order. Each loading is signed so
    that its largest-magnitude entry is positive.

    Args:
        X: Feature matrix (n >= 2)

    Returns:
        PcaResult with orthonormal loadings
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DataError("fit_pca needs a 2-D matrix with at least 2 rows")
    centered = X - X.mean(axis=0)
    cov = centered.T @ centered / (X.shape[0] - 1)
    values, vectors = linalg.eigh(cov)
    order = np.argsort(values, kind="stable")[::-1]
    values = np.clip(values[order], 0.0, None)
    vectors = vectors[:, order]
    for k in range(vectors.shape[1]):
        pivot = np.argmax(np.abs(vectors[:, k]))
        if vectors[pivot, k] < 0:
            vectors[:, k] = -vectors[:, k]
    return PcaResult(vectors, values)
