"""
Correlation-signed min-max normalization for SXI++ scoring
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from tabular.data import DataTable
from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)


class Direction(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class FeatureRange:
    min: float
    max: float
    direction: Direction

    def __post_init__(self):
        if self.max < self.min:
            raise DataError(f"range max {self.max} below min {self.min}")


@dataclass(frozen=True)
class NormalizationMap:
    """Per-feature {min, max, direction}, fixed at fit time"""
    entries: Dict[str, FeatureRange] = field(default_factory=dict)

    @property
    def features(self) -> List[str]:
        return list(self.entries)

    def __getitem__(self, name: str) -> FeatureRange:
        return self.entries[name]

    def updated(self, name: str, **changes) -> "NormalizationMap":
        entries = dict(self.entries)
        entries[name] = replace(entries[name], **changes)
        return NormalizationMap(entries)

    def to_dict(self) -> Dict[str, Any]:
        return {name: {"min": r.min, "max": r.max, "direction": r.direction.value}
                for name, r in self.entries.items()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NormalizationMap":
        return cls({name: FeatureRange(float(r["min"]), float(r["max"]), Direction(r["direction"]))
                    for name, r in data.items()})


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation; 0 when either vector is constant"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt(np.dot(da, da) * np.dot(db, db))
    if denom == 0 or not np.isfinite(denom):
        return 0.0
    return float(np.clip(np.dot(da, db) / denom, -1.0, 1.0))


def fit_normalization(train: DataTable, features: Optional[Sequence[str]] = None) -> NormalizationMap:
    """
    Fit min/max and correlation direction per feature on imputed training rows

    Args:
        train: Imputed, labelled training table
        features: Features to cover (defaults to the table's feature columns)

    Returns:
        NormalizationMap over the modeled features
    """
    features = list(train.feature_names if features is None else features)
    X = train.matrix(features)
    if np.isnan(X).any():
        raise DataError("fit_normalization needs an imputed table")
    y = train.labels()

    entries = {}
    for j, name in enumerate(features):
        column = X[:, j]
        corr = pearson(column, y)
        direction = Direction.POSITIVE if corr >= 0 else Direction.NEGATIVE
        entries[name] = FeatureRange(float(column.min()), float(column.max()), direction)
    n_negative = sum(1 for r in entries.values() if r.direction == Direction.NEGATIVE)
    logger.info(f"Fitted normalization for {len(entries)} features ({n_negative} negatively correlated)")
    return NormalizationMap(entries)


def normalize_matrix(X: np.ndarray, norm_map: NormalizationMap) -> np.ndarray:
    """
    Apply the map column-wise to a raw feature matrix ordered as norm_map.features

    positive: x / max; negative: (max - x) / max; clipped to [0, 1];
    a zero max or a degenerate range (min == max) maps to 0.
    """
    X = np.asarray(X, dtype=float)
    out = np.zeros_like(X)
    for j, name in enumerate(norm_map.features):
        r = norm_map[name]
        if r.max == 0 or r.min == r.max:
            continue
        if r.direction == Direction.POSITIVE:
            column = X[:, j] / r.max
        else:
            column = (r.max - X[:, j]) / r.max
        out[:, j] = np.clip(column, 0.0, 1.0)
    return out


def normalize(table: DataTable, norm_map: NormalizationMap) -> DataTable:
    """
    Normalize the mapped feature columns of an imputed table

    Target and identifier columns pass through untouched.
    """
    unmapped = [n for n in table.feature_names if n not in norm_map.entries]
    if unmapped:
        raise DataError(f"features missing from normalization map: {unmapped}")
    absent = [n for n in norm_map.features if n not in table.kinds]
    if absent:
        raise DataError(f"features missing from table: {absent}")
    X = table.matrix(norm_map.features)
    if np.isnan(X).any():
        raise DataError("normalize needs an imputed table")
    frame = table.frame.copy()
    frame[norm_map.features] = normalize_matrix(X, norm_map)
    return table.with_frame(frame)
