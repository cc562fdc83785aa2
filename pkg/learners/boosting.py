"""
Gradient-boosted regression trees on logistic loss
Second-order leaf weights, gain-based splits and L2 leaf regularization
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from utils.errors import ConfigError, DataError

# Configure logging
logger = logging.getLogger(__name__)

LEAF = -1


@dataclass(frozen=True)
class GbtConfig:
    n_trees: int = 50
    depth: int = 3
    learning_rate: float = 0.1
    min_leaf: int = 5
    reg_lambda: float = 1.0

    def __post_init__(self):
        if self.n_trees < 0 or self.depth < 1 or self.min_leaf < 1:
            raise ConfigError(f"invalid gbt config {self}")
        if self.learning_rate <= 0 or self.reg_lambda < 0:
            raise ConfigError(f"invalid gbt config {self}")


@dataclass
class RegressionTree:
    """Array-encoded binary tree; node 0 is the root, children of a leaf are LEAF"""
    feature: List[int] = field(default_factory=list)
    threshold: List[float] = field(default_factory=list)
    left: List[int] = field(default_factory=list)
    right: List[int] = field(default_factory=list)
    value: List[float] = field(default_factory=list)

    def add_node(self, value: float) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(value)
        return len(self.value) - 1

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf node index reached by each row"""
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold, dtype=float)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        nodes = np.zeros(X.shape[0], dtype=int)
        active = left[nodes] != LEAF
        while active.any():
            idx = np.nonzero(active)[0]
            current = nodes[idx]
            go_left = X[idx, feature[current]] <= threshold[current]
            nodes[idx] = np.where(go_left, left[current], right[current])
            active = left[nodes] != LEAF
        return nodes

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(self.value, dtype=float)[self.apply(X)]

    def to_dict(self) -> Dict[str, List]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, List]) -> "RegressionTree":
        return cls(**{k: list(v) for k, v in data.items()})


@dataclass
class GbtModel:
    config: GbtConfig
    base_score: float
    trees: List[RegressionTree]
    importances: np.ndarray
    train_loss: List[float]

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        margin = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            margin += self.config.learning_rate * tree.predict(X)
        return margin

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Class-1 probability via the logistic link"""
        return sigmoid(self.decision_function(X))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": asdict(self.config),
            "base_score": self.base_score,
            "trees": [t.to_dict() for t in self.trees],
            "importances": self.importances.tolist(),
            "train_loss": list(self.train_loss),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GbtModel":
        return cls(
            config=GbtConfig(**data["config"]),
            base_score=float(data["base_score"]),
            trees=[RegressionTree.from_dict(t) for t in data["trees"]],
            importances=np.asarray(data["importances"], dtype=float),
            train_loss=[float(v) for v in data["train_loss"]],
        )


def sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.clip(np.asarray(z, dtype=float), -30.0, 30.0)
    return 1.0 / (1.0 + np.exp(-z))


def log_loss(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(p, 1e-15, 1 - 1e-15)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


def _leaf_value(g: float, h: float, lam: float) -> float:
    return -g / (h + lam)


def _score(g: float, h: float, lam: float) -> float:
    return g * g / (h + lam)


def _best_split(X: np.ndarray, g: np.ndarray, h: np.ndarray, rows: np.ndarray, config: GbtConfig):
    """Return (gain, feature, threshold, left_rows, right_rows) or None"""
    lam = config.reg_lambda
    G, H = g[rows].sum(), h[rows].sum()
    parent = _score(G, H, lam)
    n = rows.size
    lo, hi = config.min_leaf - 1, n - config.min_leaf
    if hi <= lo:
        return None
    best = None
    for j in range(X.shape[1]):
        values = X[rows, j]
        order = np.argsort(values, kind="stable")
        sorted_vals = values[order]
        GL = np.cumsum(g[rows][order])[lo:hi]
        HL = np.cumsum(h[rows][order])[lo:hi]
        gains = 0.5 * (_score(GL, HL, lam) + _score(G - GL, H - HL, lam) - parent)
        # only cut between distinct values
        gains[sorted_vals[lo:hi] == sorted_vals[lo + 1:hi + 1]] = -np.inf
        k = int(np.argmax(gains))
        gain = float(gains[k])
        if gain > 1e-12 and (best is None or gain > best[0]):
            cut = lo + k
            threshold = 0.5 * (sorted_vals[cut] + sorted_vals[cut + 1])
            best = (gain, j, threshold, rows[order[:cut + 1]], rows[order[cut + 1:]])
    return best


def _grow(X: np.ndarray, g: np.ndarray, h: np.ndarray, config: GbtConfig, y: np.ndarray,
          importances: np.ndarray) -> RegressionTree:
    tree = RegressionTree()
    root_rows = np.arange(X.shape[0])
    tree.add_node(_leaf_value(g.sum(), h.sum(), config.reg_lambda))
    stack = [(0, root_rows, 0)]
    while stack:
        node, rows, depth = stack.pop()
        if depth >= config.depth or rows.size < 2 * config.min_leaf:
            continue
        labels = y[rows]
        if labels.min() == labels.max():
            # pure node
            continue
        split = _best_split(X, g, h, rows, config)
        if split is None:
            continue
        gain, j, threshold, left_rows, right_rows = split
        importances[j] += gain
        tree.feature[node] = j
        tree.threshold[node] = float(threshold)
        left = tree.add_node(_leaf_value(g[left_rows].sum(), h[left_rows].sum(), config.reg_lambda))
        right = tree.add_node(_leaf_value(g[right_rows].sum(), h[right_rows].sum(), config.reg_lambda))
        tree.left[node] = left
        tree.right[node] = right
        stack.append((right, right_rows, depth + 1))
        stack.append((left, left_rows, depth + 1))
    return tree


def fit_gbt(X: np.ndarray, y: np.ndarray, config: Optional[GbtConfig] = None) -> GbtModel:
    """
    Fit boosted trees on binary labels

    Args:
        X: Feature matrix (n, d)
        y: Binary labels, both classes present
        config: Boosting parameters (defaults: 50 trees, depth 3, lr 0.1, min_leaf 5)

    Returns:
        GbtModel whose importances are total split gain per feature, normalized
        to sum 1 (uniform when no split was made)
    """
    config = config or GbtConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise DataError("fit_gbt expects X of shape (n, d) and y of shape (n,)")
    if not np.isfinite(X).all():
        raise DataError("fit_gbt got non-finite inputs")
    positives = y.sum()
    if positives == 0 or positives == y.size:
        raise DataError("fit_gbt needs both classes present")

    prior = positives / y.size
    base_score = math.log(prior / (1 - prior))
    margin = np.full(y.size, base_score)
    gains = np.zeros(X.shape[1])
    trees: List[RegressionTree] = []
    losses = [log_loss(y, sigmoid(margin))]

    for t in range(config.n_trees):
        p = sigmoid(margin)
        g = p - y
        h = p * (1 - p)
        tree = _grow(X, g, h, config, y, gains)
        trees.append(tree)
        margin += config.learning_rate * tree.predict(X)
        losses.append(log_loss(y, sigmoid(margin)))
        logger.debug(f"GBT round {t + 1}/{config.n_trees}: train log-loss {losses[-1]:.6f}")

    total = gains.sum()
    importances = gains / total if total > 0 else np.full(X.shape[1], 1.0 / X.shape[1])
    logger.info(f"Fitted GBT with {len(trees)} trees on {X.shape[0]} rows x {X.shape[1]} features")
    return GbtModel(config, base_score, trees, importances, losses)
