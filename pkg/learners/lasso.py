"""
Lasso regression by cyclic coordinate descent
"""
import logging
from dataclasses import dataclass

import numpy as np

from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LassoResult:
    coef: np.ndarray
    intercept: float
    n_sweeps: int
    converged: bool


def soft_threshold(x: float, t: float) -> float:
    return float(np.sign(x) * max(abs(x) - t, 0.0))


def lambda_max(X: np.ndarray, y: np.ndarray) -> float:
    """Smallest penalty at which every coefficient is zero"""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    Xc = X - X.mean(axis=0)
    yc = y - y.mean()
    return float(np.max(np.abs(Xc.T @ yc)) / X.shape[0]) if X.shape[1] else 0.0


def fit_lasso(X: np.ndarray, y: np.ndarray, lam: float, tol: float = 1e-7, max_sweeps: int = 10000) -> LassoResult:
    """
    Minimize (1/2n)||y - X b - b0||^2 + lam * ||b||_1

    The intercept is unpenalized (handled by centering). Sweeps stop when the
    largest coefficient change in a sweep drops below `tol`.

    Args:
        X: Feature matrix (n, d), finite
        y: Response (n,)
        lam: Nonnegative penalty
        tol: Convergence threshold on coefficient change
        max_sweeps: Upper bound on full passes

    Returns:
        LassoResult with coefficients and intercept
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise DataError("fit_lasso expects X of shape (n, d) and y of shape (n,)")
    n, d = X.shape
    if n < 2:
        raise DataError(f"fit_lasso needs at least 2 rows, got {n}")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise DataError("fit_lasso got non-finite inputs")
    if lam < 0:
        raise DataError(f"lambda must be nonnegative, got {lam}")

    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean
    col_sq = (Xc ** 2).sum(axis=0) / n

    beta = np.zeros(d)
    residual = yc.copy()
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        max_change = 0.0
        for j in range(d):
            if col_sq[j] == 0:
                continue
            old = beta[j]
            rho = Xc[:, j] @ residual / n + col_sq[j] * old
            new = soft_threshold(rho, lam) / col_sq[j]
            if new != old:
                residual -= Xc[:, j] * (new - old)
                beta[j] = new
                max_change = max(max_change, abs(new - old))
        if max_change < tol:
            converged = True
            break

    if not converged:
        logger.warning(f"Lasso did not converge in {max_sweeps} sweeps (lambda={lam})")
    intercept = float(y_mean - x_mean @ beta)
    return LassoResult(beta, intercept, sweeps, converged)
