"""
Cleaning for the tabular module
Drops sparse columns and imputes the remaining missing cells
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from tabular.data import ColumnKind, DataTable
from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)

FillValue = Union[float, str]


@dataclass(frozen=True)
class ImputationStats:
    """Per-column fill values learned on training rows, reused at scoring time"""
    fills: Dict[str, FillValue] = field(default_factory=dict)
    methods: Dict[str, str] = field(default_factory=dict)

    def apply(self, table: DataTable) -> DataTable:
        """
        Fill missing cells of every column this object knows about

        Args:
            table: Table that may contain missing cells

        Returns:
            New table; columns unknown to the stats are left as they are
        """
        frame = table.frame.copy()
        for name, value in self.fills.items():
            if name in frame.columns:
                frame[name] = frame[name].where(frame[name].notna(), value)
        return DataTable(frame, dict(table.kinds))

    def to_dict(self) -> Dict[str, Any]:
        return {"fills": dict(self.fills), "methods": dict(self.methods)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ImputationStats":
        return cls(fills=dict(data["fills"]), methods=dict(data["methods"]))


def missing_fractions(table: DataTable) -> Dict[str, float]:
    """Missing-cell fraction per column"""
    if table.n_rows == 0:
        return {name: 0.0 for name in table.columns}
    mask = table.missing_mask
    return {name: float(mask[name].mean()) for name in table.columns}


def drop_sparse_columns(table: DataTable, threshold: float = 0.40) -> Tuple[DataTable, List[str]]:
    """
    Remove feature columns whose missing fraction exceeds `threshold`

    Target and identifier columns are never dropped; column order is kept.

    Args:
        table: Raw table
        threshold: Largest tolerated missing fraction, strictly inside (0, 1)

    Returns:
        Tuple of (cleaned table, names of dropped columns)
    """
    if not 0 < threshold < 1:
        raise DataError(f"threshold must be in (0, 1), got {threshold}")

    fractions = missing_fractions(table)
    features = set(table.feature_names)
    dropped = [n for n in table.columns if n in features and fractions[n] > threshold]
    kept = [n for n in table.columns if n not in dropped]

    if features and not any(n in features for n in kept):
        raise DataError("no features survive threshold")

    for name in dropped:
        logger.debug(f"Dropping {name}: {fractions[name]:.1%} missing")
    logger.info(f"Dropped {len(dropped)} of {len(features)} feature columns at threshold {threshold:.0%}")
    return table.select(kept), dropped


def fit_imputation(table: DataTable) -> ImputationStats:
    """
    Learn fill values: mean for continuous columns, mode for categorical ones

    Ties between modes resolve to the smallest value.
    """
    fills: Dict[str, FillValue] = {}
    methods: Dict[str, str] = {}
    for name in table.feature_names:
        column = table.frame[name].dropna()
        if column.empty:
            raise DataError(f"column '{name}' is fully missing; drop it before imputing")
        if table.kinds[name] == ColumnKind.CONTINUOUS:
            fills[name] = float(np.mean(column.to_numpy(dtype=float)))
            methods[name] = "mean"
        else:
            counts = column.value_counts()
            top = counts[counts == counts.max()].index
            fills[name] = sorted(top)[0]
            if isinstance(fills[name], (np.floating, np.integer)):
                fills[name] = float(fills[name])
            methods[name] = "mode"
    return ImputationStats(fills=fills, methods=methods)


def impute(table: DataTable) -> Tuple[DataTable, ImputationStats]:
    """
    Impute every missing feature cell

    Args:
        table: Table after drop_sparse_columns

    Returns:
        Tuple of (imputed table, stats to reuse on unseen rows)
    """
    stats = fit_imputation(table)
    filled = stats.apply(table)
    n_filled = int(table.missing_mask[table.feature_names].to_numpy().sum())
    logger.info(f"Imputed {n_filled} cells across {len(stats.fills)} feature columns")
    return filled, stats


def missing_report(table: DataTable, dropped: List[str], stats: ImputationStats) -> Dict[str, Any]:
    """Cleaning log written next to a prepared CSV"""
    fractions = missing_fractions(table)
    return {
        "n_rows": table.n_rows,
        "dropped": {name: fractions[name] for name in dropped},
        "retained": [n for n in table.columns if n not in dropped],
        "imputation": stats.to_dict(),
    }


def has_missing_features(table: DataTable) -> bool:
    return bool(table.missing_mask[table.feature_names].to_numpy().any())
