"""
Per-algorithm feature weights and their composite
Runs the enabled learners, normalizes their weights and counts top-5 appearances
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from learners.boosting import GbtConfig, fit_gbt
from learners.complement_nb import FORMULA as COMPLEMENT_NB_FORMULA
from learners.complement_nb import fit_complement_nb
from learners.lasso import fit_lasso
from learners.mutual_info import mutual_information
from learners.pca import fit_pca
from utils.errors import ConfigError, DataError

# Configure logging
logger = logging.getLogger(__name__)

ALGORITHMS = ("lasso", "complement_nb", "gbt", "mutual_info", "pca")
TOP_K = 5


@dataclass(frozen=True)
class LearnerConfig:
    enabled: Tuple[str, ...] = ALGORITHMS
    lasso_lambda: float = 0.01
    mi_bins: int = 10
    gbt: GbtConfig = field(default_factory=GbtConfig)

    def __post_init__(self):
        if not self.enabled:
            raise ConfigError("learners.enabled must name at least one algorithm")
        unknown = [a for a in self.enabled if a not in ALGORITHMS]
        if unknown:
            raise ConfigError(f"unknown learners {unknown}; choose from {list(ALGORITHMS)}")
        if len(set(self.enabled)) != len(self.enabled):
            raise ConfigError("learners.enabled lists an algorithm twice")
        if self.lasso_lambda < 0:
            raise ConfigError("learners.lasso_lambda must be nonnegative")
        if self.mi_bins < 2:
            raise ConfigError("learners.mi_bins must be >= 2")


@dataclass(frozen=True)
class AlgorithmWeights:
    algorithm: str
    features: Tuple[str, ...]
    raw: np.ndarray
    normalized: np.ndarray
    top5: Tuple[str, ...]

    @classmethod
    def from_raw(cls, algorithm: str, features: Sequence[str], raw: Sequence[float]) -> "AlgorithmWeights":
        """Normalize |raw| to sum 1 (uniform when all zero) and rank the top five"""
        features = tuple(features)
        raw = np.asarray(raw, dtype=float)
        if raw.shape != (len(features),):
            raise DataError(f"{algorithm}: {raw.size} weights for {len(features)} features")
        magnitude = np.abs(raw)
        total = magnitude.sum()
        if total > 0:
            normalized = magnitude / total
        else:
            normalized = np.full(len(features), 1.0 / len(features))
        order = np.argsort(-magnitude, kind="stable")[:TOP_K]
        return cls(algorithm, features, raw, normalized, tuple(features[i] for i in order))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "raw": dict(zip(self.features, self.raw.tolist())),
            "normalized": dict(zip(self.features, self.normalized.tolist())),
            "top5": list(self.top5),
        }


@dataclass(frozen=True)
class FeatureWeightSet:
    features: Tuple[str, ...]
    algorithms: Tuple[AlgorithmWeights, ...]
    composite: np.ndarray
    retained: Tuple[str, ...]
    importance_counts: np.ndarray

    def composite_dict(self) -> Dict[str, float]:
        return dict(zip(self.features, self.composite.tolist()))

    def counts_dict(self) -> Dict[str, int]:
        return dict(zip(self.features, [int(c) for c in self.importance_counts]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "features": list(self.features),
            "algorithms": [a.to_dict() for a in self.algorithms],
            "composite": self.composite_dict(),
            "retained": list(self.retained),
            "importance_counts": self.counts_dict(),
            "complement_nb_formula": COMPLEMENT_NB_FORMULA,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FeatureWeightSet":
        features = tuple(data["features"])
        algorithms = tuple(
            AlgorithmWeights(
                a["algorithm"], features,
                np.array([a["raw"][f] for f in features], dtype=float),
                np.array([a["normalized"][f] for f in features], dtype=float),
                tuple(a["top5"]),
            )
            for a in data["algorithms"]
        )
        return cls(
            features, algorithms,
            np.array([data["composite"][f] for f in features], dtype=float),
            tuple(data["retained"]),
            np.array([data["importance_counts"][f] for f in features], dtype=int),
        )


def top5_importance(top5_lists: Sequence[Sequence[str]], features: Sequence[str]) -> np.ndarray:
    """count_f = 1 + number of lists containing f"""
    counts = np.ones(len(features), dtype=int)
    index = {f: i for i, f in enumerate(features)}
    for top in top5_lists:
        for name in set(top):
            if name in index:
                counts[index[name]] += 1
    return counts


def composite_weights(per_algorithm: Sequence[AlgorithmWeights]) -> FeatureWeightSet:
    """
    Combine per-algorithm weights into one composite vector

    Args:
        per_algorithm: AlgorithmWeights over a common feature set

    Returns:
        FeatureWeightSet; composite is the mean of the normalized vectors, renormalized
    """
    if not per_algorithm:
        raise DataError("composite_weights needs at least one algorithm")
    features = per_algorithm[0].features
    for weights in per_algorithm[1:]:
        if weights.features != features:
            raise DataError(f"{weights.algorithm} reports over a different feature set")
    # sort by name so the mean is independent of algorithm order
    ordered = sorted(per_algorithm, key=lambda a: a.algorithm)
    mean = np.mean([a.normalized for a in ordered], axis=0)
    composite = mean / mean.sum()
    retained = tuple(f for f, w in zip(features, composite) if w > 0)
    counts = top5_importance([a.top5 for a in ordered], features)
    return FeatureWeightSet(features, tuple(ordered), composite, retained, counts)


def _pca_raw(X: np.ndarray) -> np.ndarray:
    """Signed first loading; zeros when the features carry no variance"""
    result = fit_pca(X)
    weights = result.feature_weights()
    return np.where(weights > 0, result.first_loading, 0.0)


def _learner_fns(config: LearnerConfig) -> Dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]]:
    return {
        "lasso": lambda X, y: fit_lasso(X, y.astype(float), config.lasso_lambda).coef,
        "complement_nb": fit_complement_nb,
        "gbt": lambda X, y: fit_gbt(X, y, config.gbt).importances,
        "mutual_info": lambda X, y: mutual_information(X, y, config.mi_bins),
        "pca": lambda X, y: _pca_raw(X),
    }


def fit_learners(X: np.ndarray, y: np.ndarray, features: Sequence[str], config: Optional[LearnerConfig] = None,
                 workers: int = 1) -> FeatureWeightSet:
    """
    Run every enabled learner on the normalized training matrix

    Args:
        X: Normalized training features (n, d)
        y: Binary training labels
        features: Column names of X
        config: Learner selection and parameters
        workers: Thread count; results do not depend on it

    Returns:
        FeatureWeightSet over `features`
    """
    config = config or LearnerConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    fns = _learner_fns(config)

    def run(name: str) -> AlgorithmWeights:
        logger.debug(f"Fitting learner {name}")
        return AlgorithmWeights.from_raw(name, features, fns[name](X, y))

    if workers > 1 and len(config.enabled) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results: List[AlgorithmWeights] = list(pool.map(run, config.enabled))
    else:
        results = [run(name) for name in config.enabled]

    weight_set = composite_weights(results)
    logger.info(f"Composite weights from {len(results)} learners; "
                f"{len(weight_set.retained)}/{len(features)} features retained")
    return weight_set
