"""
Hyperparameter search for the network
Gaussian-process surrogate with expected improvement over a discrete grid, scored by stratified CV AUC
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.stats import norm

from evaluation.roc import auc_score
from network.model import ACTIVATIONS, OPTIMIZERS, NetworkSpec, forward, init_custom
from network.training import train
from tabular.splits import stratified_kfold_indices
from utils.errors import ConfigError, TrainingError

# Configure logging
logger = logging.getLogger(__name__)

WARM_START = 5
LENGTH_SCALE = 0.5
NOISE = 1e-6
EI_XI = 0.01
STRATEGIES = ("gp", "random")


@dataclass(frozen=True)
class SearchSpace:
    hidden_layers: Tuple[int, ...] = (1, 2, 3)
    widths: Tuple[int, ...] = (8, 16, 32)
    activations: Tuple[str, ...] = ("relu", "tanh")
    optimizers: Tuple[str, ...] = OPTIMIZERS
    learning_rates: Tuple[float, ...] = (0.1, 0.01, 0.001)
    batch_sizes: Tuple[int, ...] = (32, 128)
    epochs: Tuple[int, ...] = (50, 200)
    budget: int = 15
    folds: int = 3
    strategy: str = "gp"
    seed: int = 42

    def __post_init__(self):
        for name in ("hidden_layers", "widths", "activations", "optimizers", "learning_rates",
                     "batch_sizes", "epochs"):
            if not getattr(self, name):
                raise ConfigError(f"search space field '{name}' is empty")
        if self.budget < 1:
            raise ConfigError("search budget must be >= 1")
        if self.folds < 2:
            raise ConfigError("search folds must be >= 2")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown search strategy {self.strategy}")
        if any(a not in ACTIVATIONS for a in self.activations):
            raise ConfigError(f"unknown activation in {self.activations}")
        if any(o not in OPTIMIZERS for o in self.optimizers):
            raise ConfigError(f"unknown optimizer in {self.optimizers}")

    def candidates(self) -> List[Tuple]:
        """Every grid point as (hidden_layers, width, activation, optimizer, lr, batch, epochs)"""
        return list(itertools.product(self.hidden_layers, self.widths, self.activations, self.optimizers,
                                      self.learning_rates, self.batch_sizes, self.epochs))

    def to_dict(self) -> Dict[str, Any]:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


@dataclass(frozen=True)
class SearchResult:
    spec: NetworkSpec
    cv_auc: float
    history: Tuple[Dict[str, Any], ...]

    def to_dict(self) -> Dict[str, Any]:
        return {"spec": self.spec.to_dict(), "cv_auc": self.cv_auc, "history": list(self.history)}


def candidate_spec(candidate: Tuple, input_size: int, seed: int) -> NetworkSpec:
    n_hidden, width, activation, optimizer, lr, batch, epochs = candidate
    return NetworkSpec(
        layer_sizes=(input_size,) + (width,) * n_hidden + (1,),
        activations=(activation,) * n_hidden,
        optimizer=optimizer,
        learning_rate=lr,
        batch_size=batch,
        epochs=epochs,
        seed=seed,
    )


def _rank_scale(value, choices: Sequence) -> float:
    ordered = sorted(choices)
    return ordered.index(value) / (len(ordered) - 1) if len(ordered) > 1 else 0.0


def encode(candidate: Tuple, space: SearchSpace) -> np.ndarray:
    """Numeric fields rank-scaled to [0, 1]; activation and optimizer one-hot"""
    n_hidden, width, activation, optimizer, lr, batch, epochs = candidate
    return np.array(
        [_rank_scale(n_hidden, space.hidden_layers), _rank_scale(width, space.widths)]
        + [1.0 if activation == a else 0.0 for a in space.activations]
        + [1.0 if optimizer == o else 0.0 for o in space.optimizers]
        + [_rank_scale(lr, space.learning_rates), _rank_scale(batch, space.batch_sizes),
           _rank_scale(epochs, space.epochs)]
    )


def se_kernel(A: np.ndarray, B: np.ndarray, length_scale: float = LENGTH_SCALE) -> np.ndarray:
    sq = ((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2)
    return np.exp(-0.5 * sq / length_scale ** 2)


def expected_improvement(X_obs: np.ndarray, y_obs: np.ndarray, X_cand: np.ndarray, xi: float = EI_XI) -> np.ndarray:
    """
    EI of each candidate under a GP fitted to standardized observations

    Args:
        X_obs: Encoded evaluated points
        y_obs: Their objective values (maximized)
        X_cand: Encoded unevaluated points
        xi: Exploration margin

    Returns:
        Expected improvement per candidate
    """
    std = y_obs.std()
    y = (y_obs - y_obs.mean()) / std if std > 0 else np.zeros_like(y_obs)
    K = se_kernel(X_obs, X_obs) + NOISE * np.eye(X_obs.shape[0])
    factor = linalg.cho_factor(K, lower=True)
    K_s = se_kernel(X_obs, X_cand)
    mu = K_s.T @ linalg.cho_solve(factor, y)
    var = 1.0 - np.sum(K_s * linalg.cho_solve(factor, K_s), axis=0)
    sigma = np.sqrt(np.clip(var, 1e-12, None))
    improvement = mu - y.max() - xi
    z = improvement / sigma
    return improvement * norm.cdf(z) + sigma * norm.pdf(z)


def cv_auc(spec: NetworkSpec, X: np.ndarray, y: np.ndarray, importance: Optional[np.ndarray], k: int,
           seed: int, workers: int = 1) -> float:
    """Mean held-out AUC over stratified k folds"""
    folds = stratified_kfold_indices(y, k, seed)

    def run(fold: Tuple[np.ndarray, np.ndarray]) -> float:
        fit_idx, held_idx = fold
        params = train(spec, init_custom(spec, importance), X[fit_idx], y[fit_idx])
        return auc_score(forward(spec, params, X[held_idx]), y[held_idx])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(run, folds))
    else:
        scores = [run(fold) for fold in folds]
    return float(np.mean(scores))


def hyperparameter_search(space: SearchSpace, X: np.ndarray, y: np.ndarray,
                          importance_counts: Optional[Sequence[float]] = None, k: Optional[int] = None,
                          workers: int = 1) -> SearchResult:
    """
    Sequential model-based search over the discrete space

    The first min(budget, 5) evaluations are seeded-random draws; after that the
    GP/EI acquisition (or more random draws for strategy "random") picks the
    next unevaluated candidate. Ties go to the earliest candidate in grid order.

    Args:
        space: Candidate sets, budget, folds, strategy and seed
        X: Training matrix fed to the network
        y: Binary labels
        importance_counts: Per-input counts for init_custom
        k: Fold count (defaults to space.folds)
        workers: Threads for fold evaluation

    Returns:
        SearchResult with the best spec by mean CV AUC (ties: earliest evaluated)
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    k = space.folds if k is None else k
    if k < 2:
        raise ConfigError("k must be >= 2")
    importance = None if importance_counts is None else np.asarray(importance_counts, dtype=float)
    candidates = space.candidates()
    encoded = np.array([encode(c, space) for c in candidates])
    rng = np.random.default_rng(space.seed)
    budget = min(space.budget, len(candidates))

    evaluated: List[int] = []
    values: List[float] = []
    history: List[Dict[str, Any]] = []
    warm = rng.permutation(len(candidates))[:min(budget, WARM_START)].tolist()

    while len(evaluated) < budget:
        seen = set(evaluated)
        remaining = [i for i in range(len(candidates)) if i not in seen]
        if warm:
            pick = warm.pop(0)
        elif space.strategy == "random":
            pick = remaining[int(rng.integers(len(remaining)))]
        else:
            finite = [j for j, v in enumerate(values) if np.isfinite(v)]
            if finite:
                ei = expected_improvement(encoded[[evaluated[j] for j in finite]],
                                          np.array([values[j] for j in finite]), encoded[remaining])
                pick = remaining[int(np.argmax(ei))]
            else:
                pick = remaining[0]

        spec = candidate_spec(candidates[pick], X.shape[1], space.seed)
        try:
            value = cv_auc(spec, X, y, importance, k, space.seed, workers)
        except TrainingError as e:
            logger.warning(f"Candidate {candidates[pick]} failed: {e}")
            value = float("-inf")
        evaluated.append(pick)
        values.append(value)
        history.append({"candidate": list(candidates[pick]), "cv_auc": value if np.isfinite(value) else None})
        logger.debug(f"Search step {len(evaluated)}/{budget}: {candidates[pick]} -> CV AUC {value:.4f}")

    finite_values = [v for v in values if np.isfinite(v)]
    if not finite_values:
        raise TrainingError("search budget exhausted without a finite score")
    best_pos = int(np.argmax(values))
    best_spec = candidate_spec(candidates[evaluated[best_pos]], X.shape[1], space.seed)
    logger.info(f"Hyperparameter search done: best CV AUC {values[best_pos]:.4f} "
                f"after {len(evaluated)} evaluations")
    return SearchResult(best_spec, values[best_pos], tuple(history))
