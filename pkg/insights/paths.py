"""
Target decision-path extraction from a fitted forest
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from insights.forest import RandomForest
from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Condition:
    feature: str
    comparator: str  # "<=" or ">"
    threshold: float

    def holds(self, values: np.ndarray) -> np.ndarray:
        return values <= self.threshold if self.comparator == "<=" else values > self.threshold

    def to_dict(self) -> Dict[str, Any]:
        return {"feature": self.feature, "comparator": self.comparator, "threshold": self.threshold}


@dataclass(frozen=True)
class RulePath:
    conditions: Tuple[Condition, ...]
    leaf_class: int
    purity: float
    coverage: int
    tree: int

    @property
    def score(self) -> float:
        return self.purity * self.coverage

    def intervals(self) -> List[Tuple[str, Optional[float], Optional[float]]]:
        """(feature, lower bound exclusive, upper bound inclusive) per feature in path order"""
        bounds: Dict[str, List[Optional[float]]] = {}
        for c in self.conditions:
            entry = bounds.setdefault(c.feature, [None, None])
            if c.comparator == ">":
                entry[0] = c.threshold
            else:
                entry[1] = c.threshold
        return [(name, lo, hi) for name, (lo, hi) in bounds.items()]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "conditions": [c.to_dict() for c in self.conditions],
            "leaf_class": self.leaf_class,
            "purity": self.purity,
            "coverage": self.coverage,
            "tree": self.tree,
        }


def merge_conditions(conditions: List[Condition]) -> Tuple[Condition, ...]:
    """
    Collapse repeated conditions on one feature into a single interval

    The tightest lower bound (largest '>' threshold) and the tightest upper
    bound (smallest '<=' threshold) survive; features keep first-appearance order.
    """
    order: List[str] = []
    lower: Dict[str, float] = {}
    upper: Dict[str, float] = {}
    for c in conditions:
        if c.feature not in order:
            order.append(c.feature)
        if c.comparator == ">":
            lower[c.feature] = max(lower.get(c.feature, -np.inf), c.threshold)
        else:
            upper[c.feature] = min(upper.get(c.feature, np.inf), c.threshold)
    merged = []
    for name in order:
        if name in lower:
            merged.append(Condition(name, ">", lower[name]))
        if name in upper:
            merged.append(Condition(name, "<=", upper[name]))
    return tuple(merged)


def verify_path(forest: RandomForest, conditions: Tuple[Condition, ...], target_class: int) -> Tuple[float, int]:
    """Purity and coverage of a rule by direct filtering of the training rows"""
    mask = np.ones(forest.y_train.size, dtype=bool)
    index = {name: j for j, name in enumerate(forest.feature_names)}
    for c in conditions:
        mask &= c.holds(forest.X_train[:, index[c.feature]])
    coverage = int(mask.sum())
    purity = float(np.mean(forest.y_train[mask] == target_class)) if coverage else 0.0
    return purity, coverage


def extract_target_path(forest: RandomForest, target_class: int = 1) -> RulePath:
    """
    Best root-to-leaf rule whose leaf predicts `target_class`

    Candidates are scored by purity x coverage on the full training data;
    ties go to higher coverage, then to the earlier tree.

    Args:
        forest: Fitted forest
        target_class: 0 or 1

    Returns:
        RulePath with merged conditions
    """
    if target_class not in (0, 1):
        raise DataError(f"target_class must be 0 or 1, got {target_class}")
    best: Optional[RulePath] = None
    for t, tree in enumerate(forest.trees):
        for node, raw in tree.leaf_paths():
            if tree.node_class(node) != target_class:
                continue
            conditions = merge_conditions([Condition(forest.feature_names[f], op, thr) for f, op, thr in raw])
            purity, coverage = verify_path(forest, conditions, target_class)
            candidate = RulePath(conditions, target_class, purity, coverage, t)
            if best is None or (candidate.score, candidate.coverage) > (best.score, best.coverage):
                best = candidate
    if best is None:
        raise DataError(f"no qualifying path for class {target_class}")
    logger.info(f"Target path for class {target_class}: {len(best.conditions)} conditions, "
                f"purity {best.purity:.3f}, coverage {best.coverage} (tree {best.tree})")
    return best
