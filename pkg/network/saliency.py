"""
Refined per-feature weights from the trained network
"""
import logging
from typing import Sequence

import numpy as np

from network.model import NetworkParams

# Configure logging
logger = logging.getLogger(__name__)

MAX_LAYERS = 5


def extract_feature_weights(params: NetworkParams, max_layers: int = MAX_LAYERS) -> np.ndarray:
    """
    Propagate weight magnitudes from the first layers back to the inputs

    s = |W1| |W2| ... |Wm| 1 with m = min(max_layers, number of layers),
    then normalized to sum 1 (uniform if every path weight is zero).

    Args:
        params: Trained parameters
        max_layers: Number of leading layers to use

    Returns:
        Nonnegative weight per input feature summing to 1
    """
    m = min(max_layers, len(params.weights))
    product = np.abs(params.weights[0])
    for W in params.weights[1:m]:
        product = product @ np.abs(W)
    saliency = product.sum(axis=1)
    total = saliency.sum()
    if total <= 0:
        logger.warning("Network saliency is zero everywhere; using uniform weights")
        return np.full(saliency.size, 1.0 / saliency.size)
    return saliency / total


def drop_inputs(weights: np.ndarray, drop: Sequence[int]) -> np.ndarray:
    """Remove the given input positions and renormalize the rest"""
    keep = np.setdiff1d(np.arange(weights.size), np.asarray(drop, dtype=int))
    kept = np.asarray(weights, dtype=float)[keep]
    total = kept.sum()
    return kept / total if total > 0 else np.full(kept.size, 1.0 / kept.size)
