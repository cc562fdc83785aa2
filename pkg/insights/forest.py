"""
Depth-limited random forest of Gini classification trees
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.errors import ConfigError, DataError

# Configure logging
logger = logging.getLogger(__name__)

LEAF = -1


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 25
    depth: int = 4
    min_leaf: int = 5
    feature_subsample: Union[str, int] = "sqrt"
    bootstrap: bool = True
    seed: int = 42
    tie_class: int = 0

    def __post_init__(self):
        if self.n_trees < 1 or self.depth < 1 or self.min_leaf < 1:
            raise ConfigError(f"invalid forest config {self}")
        if self.tie_class not in (0, 1):
            raise ConfigError("tie_class must be 0 or 1")
        if isinstance(self.feature_subsample, str):
            if self.feature_subsample not in ("sqrt", "all"):
                raise ConfigError(f"feature_subsample must be 'sqrt', 'all' or a count, "
                                  f"got {self.feature_subsample}")
        elif self.feature_subsample < 1:
            raise ConfigError("feature_subsample count must be >= 1")

    def n_features(self, d: int) -> int:
        if self.feature_subsample == "all":
            return d
        if self.feature_subsample == "sqrt":
            return max(1, int(math.floor(math.sqrt(d))))
        return min(int(self.feature_subsample), d)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ClassificationTree:
    """Array-encoded tree; counts[node] holds the (class 0, class 1) sample counts"""
    feature: List[int] = field(default_factory=list)
    threshold: List[float] = field(default_factory=list)
    left: List[int] = field(default_factory=list)
    right: List[int] = field(default_factory=list)
    counts: List[Tuple[int, int]] = field(default_factory=list)
    tie_class: int = 0

    def add_node(self, counts: Tuple[int, int]) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.counts.append(counts)
        return len(self.counts) - 1

    def is_leaf(self, node: int) -> bool:
        return self.left[node] == LEAF

    def node_class(self, node: int) -> int:
        n0, n1 = self.counts[node]
        if n0 == n1:
            return self.tie_class
        return 1 if n1 > n0 else 0

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0], dtype=int)
        for i, row in enumerate(X):
            node = 0
            while not self.is_leaf(node):
                node = self.left[node] if row[self.feature[node]] <= self.threshold[node] else self.right[node]
            out[i] = self.node_class(node)
        return out

    def max_depth(self) -> int:
        depth = {0: 0}
        for node in range(len(self.counts)):
            if not self.is_leaf(node):
                depth[self.left[node]] = depth[node] + 1
                depth[self.right[node]] = depth[node] + 1
        return max(depth.values())

    def leaf_paths(self) -> List[Tuple[int, List[Tuple[int, str, float]]]]:
        """Every (leaf node, [(feature, '<=' or '>', threshold), ...]) from the root"""
        paths = []
        stack = [(0, [])]
        while stack:
            node, conditions = stack.pop()
            if self.is_leaf(node):
                paths.append((node, conditions))
                continue
            f, t = self.feature[node], self.threshold[node]
            stack.append((self.right[node], conditions + [(f, ">", t)]))
            stack.append((self.left[node], conditions + [(f, "<=", t)]))
        return paths


def gini(n0: np.ndarray, n1: np.ndarray) -> np.ndarray:
    total = n0 + n1
    safe = np.where(total > 0, total, 1)
    return 1.0 - (n0 / safe) ** 2 - (n1 / safe) ** 2


def _best_split(X: np.ndarray, y: np.ndarray, rows: np.ndarray, features: np.ndarray, min_leaf: int):
    n = rows.size
    lo, hi = min_leaf - 1, n - min_leaf
    if hi <= lo:
        return None
    total1 = int(y[rows].sum())
    total0 = n - total1
    best = None
    for j in features:
        values = X[rows, j]
        order = np.argsort(values, kind="stable")
        sorted_vals = values[order]
        left1 = np.cumsum(y[rows][order])[lo:hi]
        left_n = np.arange(lo + 1, hi + 1)
        left0 = left_n - left1
        right1 = total1 - left1
        right0 = total0 - left0
        impurity = (left_n * gini(left0, left1) + (n - left_n) * gini(right0, right1)) / n
        impurity = np.where(sorted_vals[lo:hi] == sorted_vals[lo + 1:hi + 1], np.inf, impurity)
        k = int(np.argmin(impurity))
        if not np.isfinite(impurity[k]):
            continue
        if best is None or impurity[k] < best[0]:
            cut = lo + k
            threshold = 0.5 * (sorted_vals[cut] + sorted_vals[cut + 1])
            best = (float(impurity[k]), int(j), float(threshold), rows[order[:cut + 1]], rows[order[cut + 1:]])
    return best


def fit_tree(X: np.ndarray, y: np.ndarray, config: ForestConfig, rng: np.random.Generator) -> ClassificationTree:
    """Grow one Gini tree to at most config.depth splits on any path"""
    tree = ClassificationTree(tie_class=config.tie_class)
    n, d = X.shape
    rows = rng.integers(0, n, size=n) if config.bootstrap else np.arange(n)
    m = config.n_features(d)

    def counts_of(idx: np.ndarray) -> Tuple[int, int]:
        n1 = int(y[idx].sum())
        return idx.size - n1, n1

    tree.add_node(counts_of(rows))
    stack = [(0, rows, 0)]
    while stack:
        node, idx, depth = stack.pop()
        n0, n1 = tree.counts[node]
        if depth >= config.depth or n0 == 0 or n1 == 0 or idx.size < 2 * config.min_leaf:
            continue
        features = np.sort(rng.choice(d, size=m, replace=False)) if m < d else np.arange(d)
        split = _best_split(X, y, idx, features, config.min_leaf)
        if split is None:
            continue
        impurity, j, threshold, left_idx, right_idx = split
        if impurity >= gini(np.array([n0]), np.array([n1]))[0]:
            continue
        tree.feature[node] = j
        tree.threshold[node] = threshold
        tree.left[node] = tree.add_node(counts_of(left_idx))
        tree.right[node] = tree.add_node(counts_of(right_idx))
        stack.append((tree.right[node], right_idx, depth + 1))
        stack.append((tree.left[node], left_idx, depth + 1))
    return tree


@dataclass
class RandomForest:
    config: ForestConfig
    feature_names: Tuple[str, ...]
    trees: List[ClassificationTree]
    X_train: np.ndarray
    y_train: np.ndarray

    def tree_votes(self, X: np.ndarray) -> np.ndarray:
        return np.array([tree.predict(np.asarray(X, dtype=float)) for tree in self.trees])

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Majority vote over trees; ties go to config.tie_class"""
        votes = self.tree_votes(X)
        ones = votes.sum(axis=0)
        zeros = votes.shape[0] - ones
        out = np.where(ones > zeros, 1, 0)
        return np.where(ones == zeros, self.config.tie_class, out)


def fit_random_forest(X: np.ndarray, y: np.ndarray, feature_names: Optional[Sequence[str]] = None,
                      config: Optional[ForestConfig] = None, workers: int = 1) -> RandomForest:
    """
    Bootstrap-sampled, feature-subsampled Gini trees

    Args:
        X: Feature matrix
        y: Binary labels, both classes present
        feature_names: Column names of X
        config: Forest parameters (default 25 trees of depth 4)
        workers: Thread count; each tree has its own derived seed

    Returns:
        RandomForest holding its training data for path re-verification
    """
    config = config or ForestConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise DataError("fit_random_forest expects X of shape (n, d) and one label per row")
    if not np.isfinite(X).all():
        raise DataError("fit_random_forest got non-finite inputs")
    if y.min() == y.max():
        raise DataError("fit_random_forest needs both classes present")
    names = tuple(feature_names) if feature_names is not None else tuple(f"x{j + 1}" for j in range(X.shape[1]))

    seeds = np.random.SeedSequence(config.seed).spawn(config.n_trees)

    def grow(seed: np.random.SeedSequence) -> ClassificationTree:
        return fit_tree(X, y, config, np.random.default_rng(seed))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trees = list(pool.map(grow, seeds))
    else:
        trees = [grow(s) for s in seeds]
    logger.info(f"Fitted random forest: {len(trees)} trees, depth <= {config.depth}, {X.shape[0]} rows")
    return RandomForest(config, names, trees, X, y)
