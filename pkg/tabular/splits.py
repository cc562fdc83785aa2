"""
Splitting utilities for the tabular module
Stratified train/test/validation partitions and stratified k-fold indices
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from tabular.data import DataTable
from utils.errors import ConfigError, DataError

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = 0.70
    test_frac: float = 0.20
    val_frac: float = 0.10
    stratify: bool = True
    seed: int = 42
    group_by_patient: bool = False

    def __post_init__(self):
        fracs = self.fractions
        if any(not 0 < f < 1 for f in fracs):
            raise ConfigError(f"split fractions must each be in (0, 1), got {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise ConfigError(f"split fractions must sum to 1, got {sum(fracs)}")

    @property
    def fractions(self) -> Tuple[float, float, float]:
        return (self.train_frac, self.test_frac, self.val_frac)


def apportion(total: int, fractions: Sequence[float]) -> List[int]:
    """
    Largest-remainder apportionment of `total` items over `fractions`

    Ties in the remainder go to the earlier part.
    """
    quotas = [total * f for f in fractions]
    counts = [int(np.floor(q + 1e-9)) for q in quotas]
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:total - sum(counts)]:
        counts[i] += 1
    return counts


def _deal(indices: np.ndarray, counts: Sequence[int]) -> List[np.ndarray]:
    bounds = np.cumsum([0] + list(counts))
    return [indices[bounds[i]:bounds[i + 1]] for i in range(len(counts))]


def split_indices(labels: np.ndarray, spec: SplitSpec, groups: Sequence = None) -> List[np.ndarray]:
    """
    Partition row indices into train/test/validation parts

    Args:
        labels: Binary label per row
        spec: Split fractions, stratification and seed
        groups: Optional group key per row; rows of one group land in one part

    Returns:
        Three sorted index arrays (train, test, validation)
    """
    labels = np.asarray(labels).astype(int)
    n = labels.shape[0]
    if n < 10:
        raise DataError(f"split needs at least 10 rows, got {n}")
    if len(np.unique(labels)) < 2:
        raise DataError("split needs both classes present")

    rng = np.random.default_rng(spec.seed)
    n_parts = len(spec.fractions)

    if groups is not None:
        unit_rows, unit_labels = _group_units(labels, groups)
    else:
        unit_rows = [np.array([i]) for i in range(n)]
        unit_labels = labels

    parts: List[List[int]] = [[] for _ in range(n_parts)]
    if spec.stratify:
        for cls in (0, 1):
            members = np.flatnonzero(unit_labels == cls)
            if members.size < n_parts:
                raise DataError(f"cannot stratify: class {cls} has {members.size} units for {n_parts} parts")
            members = rng.permutation(members)
            for part, chunk in zip(parts, _deal(members, apportion(members.size, spec.fractions))):
                part.extend(chunk.tolist())
    else:
        units = rng.permutation(len(unit_rows))
        for part, chunk in zip(parts, _deal(units, apportion(units.size, spec.fractions))):
            part.extend(chunk.tolist())

    out = []
    for part in parts:
        rows = np.concatenate([unit_rows[u] for u in part]) if part else np.array([], dtype=int)
        out.append(np.sort(rows.astype(int)))
    return out


def _group_units(labels: np.ndarray, groups: Sequence) -> Tuple[List[np.ndarray], np.ndarray]:
    """Collapse rows into groups labelled by their majority class (ties -> 1)"""
    index: Dict[object, List[int]] = {}
    for i, g in enumerate(groups):
        index.setdefault(g, []).append(i)
    keys = sorted(index, key=str)
    rows = [np.array(index[k]) for k in keys]
    unit_labels = np.array([int(labels[r].mean() >= 0.5) for r in rows])
    return rows, unit_labels


def split(table: DataTable, spec: SplitSpec) -> Tuple[DataTable, DataTable, DataTable]:
    """
    Split a table 70/20/10 (by default) into train, test and validation

    Args:
        table: Labelled table
        spec: Split configuration

    Returns:
        Tuple of (train, test, validation) tables
    """
    groups = None
    if spec.group_by_patient:
        if not table.identifier_names:
            raise DataError("group_by_patient requires an identifier column")
        groups = table.frame[table.identifier_names[0]].tolist()
    train_idx, test_idx, val_idx = split_indices(table.labels(), spec, groups)
    logger.info(f"Split {table.n_rows} rows into train={len(train_idx)}, "
                f"test={len(test_idx)}, validation={len(val_idx)}")
    return table.take(train_idx), table.take(test_idx), table.take(val_idx)


def stratified_kfold_indices(labels: np.ndarray, k: int, seed: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Stratified k-fold over a label vector

    Each class is shuffled, then the concatenated class sequences are dealt
    round-robin into folds, so every holdout is within one row of the global
    class ratio and fold sizes differ by at most one.

    Returns:
        List of (train indices, holdout indices), both sorted
    """
    labels = np.asarray(labels).astype(int)
    if k < 2:
        raise DataError(f"k must be >= 2, got {k}")
    counts = [int((labels == c).sum()) for c in (0, 1)]
    if min(counts) < k:
        raise DataError(f"k={k} exceeds minority-class count {min(counts)}")

    rng = np.random.default_rng(seed)
    sequence = np.concatenate([rng.permutation(np.flatnonzero(labels == c)) for c in (0, 1)])
    fold_of = np.empty(labels.shape[0], dtype=int)
    fold_of[sequence] = np.arange(sequence.size) % k

    folds = []
    for fold in range(k):
        holdout = np.flatnonzero(fold_of == fold)
        train = np.flatnonzero(fold_of != fold)
        folds.append((train, holdout))
    return folds


def stratified_kfold(table: DataTable, k: int, seed: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Stratified k-fold index pairs over a labelled table"""
    return stratified_kfold_indices(table.labels(), k, seed)
