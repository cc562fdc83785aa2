"""
Lasso-driven min/max remapping of the normalization map
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from learners.lasso import fit_lasso
from scoring.normalization import NormalizationMap
from tabular.data import DataTable
from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)

COEF_TOL = 1e-8


def lasso_remap(train: DataTable, normalized: DataTable, flags: Sequence[int], norm_map: NormalizationMap,
                lam: float = 0.01) -> NormalizationMap:
    """
    Move feature extremes toward the flag=1 subgroup

    A lasso of the flags on the normalized features decides per feature:
    coefficient > tol sets max to the largest raw value among flag=1 rows,
    coefficient < -tol sets min to the smallest one, anything else is kept.

    Args:
        train: Imputed raw training table
        normalized: The same rows after normalize()
        flags: Benchmark flags of those rows
        norm_map: Map used to produce `normalized`
        lam: Lasso penalty

    Returns:
        New NormalizationMap (the input map is not modified)
    """
    remapped, _ = lasso_remap_with_coefficients(train, normalized, flags, norm_map, lam)
    return remapped


def lasso_remap_with_coefficients(train: DataTable, normalized: DataTable, flags: Sequence[int],
                                  norm_map: NormalizationMap, lam: float = 0.01
                                  ) -> Tuple[NormalizationMap, Optional[np.ndarray]]:
    """lasso_remap that also returns the fitted coefficients (None when skipped)"""
    flags = np.asarray(flags).astype(int)
    if flags.shape[0] != train.n_rows or normalized.n_rows != train.n_rows:
        raise DataError("train, normalized and flags must describe the same rows")
    if lam < 0:
        raise DataError(f"lambda must be nonnegative, got {lam}")

    favourable = flags == 1
    if not favourable.any():
        logger.warning("No flag=1 rows; normalization map left unchanged")
        return norm_map, None

    features = norm_map.features
    fit = fit_lasso(normalized.matrix(features), flags.astype(float), lam)
    raw = train.matrix(features)[favourable]

    remapped = norm_map
    changed = 0
    for j, name in enumerate(features):
        coef = fit.coef[j]
        if coef > COEF_TOL:
            remapped = remapped.updated(name, max=float(raw[:, j].max()))
            changed += 1
        elif coef < -COEF_TOL:
            remapped = remapped.updated(name, min=float(raw[:, j].min()))
            changed += 1
    logger.info(f"Lasso remap changed {changed} of {len(features)} feature ranges (lambda={lam})")
    return remapped, fit.coef
