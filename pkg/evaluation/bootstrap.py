"""
Percentile bootstrap confidence intervals
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from utils.errors import DataError, SxiError

# Configure logging
logger = logging.getLogger(__name__)

MetricFn = Callable[[np.ndarray, np.ndarray], Optional[float]]


def _resample_metric(metric_fn: MetricFn, scores: np.ndarray, labels: np.ndarray,
                     seed: np.random.SeedSequence) -> Optional[float]:
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, labels.size, size=labels.size)
    try:
        value = metric_fn(scores[idx], labels[idx])
    except SxiError:
        # e.g. a resample holding a single class for AUC
        return None
    return None if value is None else float(value)


def bootstrap_ci(metric_fn: MetricFn, scores: Sequence[float], labels: Sequence[int], n_boot: int = 1000,
                 level: float = 0.95, seed: int = 0, workers: int = 1) -> Tuple[Optional[float], Optional[float]]:
    """
    Row-resampling percentile interval for a metric

    Resamples where the metric is undefined are skipped. Each resample draws
    from its own child seed, so the result does not depend on `workers`.

    Args:
        metric_fn: f(scores, labels) -> value or None
        scores: Scores or predictions per row
        labels: Binary labels per row
        n_boot: Number of resamples, at least 100
        level: Coverage, e.g. 0.95 for the 2.5/97.5 percentiles
        seed: Master seed
        workers: Thread count

    Returns:
        (low, high), or (None, None) when no resample gave a value
    """
    if n_boot < 100:
        raise DataError(f"n_boot must be >= 100, got {n_boot}")
    if not 0 < level < 1:
        raise DataError(f"level must be in (0, 1), got {level}")
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(int)
    if scores.shape != labels.shape or labels.size == 0:
        raise DataError("bootstrap_ci needs equally long, nonempty scores and labels")

    children = np.random.SeedSequence(seed).spawn(n_boot)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda s: _resample_metric(metric_fn, scores, labels, s), children))
    else:
        values = [_resample_metric(metric_fn, scores, labels, s) for s in children]

    valid = np.array([v for v in values if v is not None], dtype=float)
    if valid.size == 0:
        logger.warning("Bootstrap produced no valid resamples")
        return None, None
    if valid.size < n_boot:
        logger.debug(f"Bootstrap skipped {n_boot - valid.size} undefined resamples")
    tail = (1 - level) / 2 * 100
    low, high = np.percentile(valid, [tail, 100 - tail])
    return float(low), float(high)
