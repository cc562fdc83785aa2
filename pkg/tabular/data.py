"""
Data management for the tabular module
Holds the DataTable type and handles loading and saving CSV files

CSV input is parsed with csv.reader rather than pandas.read_csv: pandas pads short
rows with NaN, and ragged rows must be rejected with their line number.
"""
import csv
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from utils.config import IDENTIFIER_COLUMN, MISSING_TOKENS, TARGET_COLUMN
from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)


class ColumnKind(str, Enum):
    CONTINUOUS = "continuous"
    CATEGORICAL = "categorical"
    TARGET = "target"
    IDENTIFIER = "identifier"


@dataclass(frozen=True)
class DataTable:
    """
    Rows x named columns with a kind per column

    Missing cells are NaN (or None for text cells) in `frame`; `missing_mask`
    is derived from that, so a masked cell never carries a payload.
    """
    frame: pd.DataFrame
    kinds: Dict[str, ColumnKind] = field(default_factory=dict)

    def __post_init__(self):
        names = list(self.frame.columns)
        if len(set(names)) != len(names):
            raise DataError(f"duplicate column names: {sorted(n for n in set(names) if names.count(n) > 1)}")
        if set(names) != set(self.kinds):
            raise DataError("column kinds do not cover exactly the table columns")
        targets = [n for n in names if self.kinds[n] == ColumnKind.TARGET]
        if len(targets) != 1:
            raise DataError(f"exactly one target column required, found {len(targets)}")
        values = pd.to_numeric(self.frame[targets[0]], errors="coerce")
        present = self.frame[targets[0]].notna()
        if values[present].isna().any() or not values[present].isin([0, 1]).all():
            raise DataError(f"non-binary target in column '{targets[0]}'")

    # Shape and naming

    @property
    def columns(self) -> List[str]:
        return list(self.frame.columns)

    @property
    def n_rows(self) -> int:
        return int(self.frame.shape[0])

    @property
    def n_cols(self) -> int:
        return int(self.frame.shape[1])

    @property
    def missing_mask(self) -> pd.DataFrame:
        return self.frame.isna()

    @property
    def target_name(self) -> str:
        return next(n for n in self.columns if self.kinds[n] == ColumnKind.TARGET)

    @property
    def feature_names(self) -> List[str]:
        """Continuous and categorical columns, in table order"""
        return [n for n in self.columns
                if self.kinds[n] in (ColumnKind.CONTINUOUS, ColumnKind.CATEGORICAL)]

    @property
    def identifier_names(self) -> List[str]:
        return [n for n in self.columns if self.kinds[n] == ColumnKind.IDENTIFIER]

    # Accessors

    def labels(self) -> np.ndarray:
        """Target as an int array; raises when any label is missing"""
        target = self.frame[self.target_name]
        if target.isna().any():
            raise DataError(f"target column '{self.target_name}' has missing labels")
        return target.to_numpy(dtype=float).astype(int)

    def has_labels(self) -> bool:
        return bool(self.frame[self.target_name].notna().all()) and self.n_rows > 0

    def matrix(self, names: Optional[Sequence[str]] = None) -> np.ndarray:
        """
        Feature values as a float matrix

        Args:
            names: Columns to take (defaults to feature_names)

        Returns:
            Array of shape (n_rows, len(names)); missing cells are NaN
        """
        names = list(self.feature_names if names is None else names)
        missing = [n for n in names if n not in self.kinds]
        if missing:
            raise DataError(f"columns not in table: {missing}")
        try:
            return self.frame[names].to_numpy(dtype=float)
        except (TypeError, ValueError) as e:
            raise DataError(f"non-numeric feature values in {names}: {e}") from e

    # Derivations (always return new tables)

    def take(self, indices: Iterable[int]) -> "DataTable":
        rows = self.frame.iloc[list(indices)].reset_index(drop=True)
        return DataTable(rows, dict(self.kinds))

    def select(self, names: Sequence[str]) -> "DataTable":
        names = list(names)
        return DataTable(self.frame[names].copy(), {n: self.kinds[n] for n in names})

    def with_frame(self, frame: pd.DataFrame) -> "DataTable":
        """New table over `frame`, keeping kinds for columns that survive"""
        return DataTable(frame, {n: self.kinds.get(n, ColumnKind.CONTINUOUS) for n in frame.columns})

    def with_labels(self, labels: Sequence[float]) -> "DataTable":
        frame = self.frame.copy()
        frame[self.target_name] = np.asarray(labels, dtype=float)
        return DataTable(frame, dict(self.kinds))

    @classmethod
    def from_arrays(cls, X: np.ndarray, y: Optional[Sequence[float]], names: Optional[Sequence[str]] = None,
                    target: str = TARGET_COLUMN) -> "DataTable":
        """Build an all-continuous table from a feature matrix and labels"""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise DataError("feature matrix must be 2-dimensional")
        names = list(names) if names is not None else [f"x{j + 1}" for j in range(X.shape[1])]
        frame = pd.DataFrame(X, columns=names)
        frame[target] = np.nan if y is None else np.asarray(y, dtype=float)
        kinds = {n: ColumnKind.CONTINUOUS for n in names}
        kinds[target] = ColumnKind.TARGET
        return cls(frame, kinds)


def _is_missing(cell: str) -> bool:
    return cell.strip().lower() in MISSING_TOKENS


def _parse_number(cell: str) -> Optional[float]:
    try:
        value = float(cell)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def load_csv(path: str, schema: Optional[Dict[str, str]] = None, target: Optional[str] = None,
             require_target: bool = True) -> DataTable:
    """
    Load a CSV file into a DataTable

    Kinds come from `schema` hints; unhinted columns are inferred: the
    target/identifier names of the PhysioNet layout, all-numeric columns as
    continuous, anything else as categorical.

    Args:
        path: CSV file with a header row
        schema: Optional mapping column name -> kind ("continuous", "categorical", "target", "identifier")
        target: Target column name (defaults to the hinted target or SepsisLabel)
        require_target: When False and the target column is absent, an all-missing
            target column is appended (unlabeled rows for scoring)

    Returns:
        Parsed DataTable
    """
    schema = {k: ColumnKind(v) for k, v in (schema or {}).items()}
    try:
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
    except (OSError, UnicodeDecodeError) as e:
        raise DataError(f"cannot read {path}: {e}") from e

    if not rows:
        raise DataError(f"{path}: empty file, header row required")
    header = [h.strip() for h in rows[0]]
    duplicates = sorted({h for h in header if header.count(h) > 1})
    if duplicates:
        raise DataError(f"{path}: duplicate header names {duplicates}")
    body = [r for r in rows[1:] if r]
    for line_no, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"{path}: ragged row at line {line_no} ({len(row)} cells, header has {len(header)})")

    hinted_target = [n for n, k in schema.items() if k == ColumnKind.TARGET]
    target = target or (hinted_target[0] if hinted_target else TARGET_COLUMN)

    columns: Dict[str, list] = {}
    kinds: Dict[str, ColumnKind] = {}
    for j, name in enumerate(header):
        cells = [row[j] for row in body]
        kind = schema.get(name)
        if kind is None:
            if name == target:
                kind = ColumnKind.TARGET
            elif name == IDENTIFIER_COLUMN:
                kind = ColumnKind.IDENTIFIER
            else:
                numeric = all(_is_missing(c) or _parse_number(c) is not None for c in cells)
                kind = ColumnKind.CONTINUOUS if numeric else ColumnKind.CATEGORICAL
        columns[name] = _parse_column(path, name, kind, cells)
        kinds[name] = kind

    if target not in kinds:
        if require_target:
            raise DataError(f"{path}: target column '{target}' absent")
        columns[target] = [np.nan] * len(body)
        kinds[target] = ColumnKind.TARGET
    elif kinds[target] != ColumnKind.TARGET:
        kinds[target] = ColumnKind.TARGET

    frame = pd.DataFrame(columns, columns=list(columns))
    table = DataTable(frame, kinds)
    logger.info(f"Loaded {path}: {table.n_rows} rows, {table.n_cols} columns, "
                f"{int(table.missing_mask.to_numpy().sum())} missing cells")
    return table


def _parse_column(path: str, name: str, kind: ColumnKind, cells: List[str]) -> list:
    if kind in (ColumnKind.CONTINUOUS, ColumnKind.TARGET):
        values = []
        for i, cell in enumerate(cells):
            if _is_missing(cell):
                values.append(np.nan)
                continue
            value = _parse_number(cell)
            if value is None:
                raise DataError(f"{path}: parse error in column '{name}', row {i + 1}: {cell!r}")
            values.append(value)
        return values
    if kind == ColumnKind.CATEGORICAL:
        parsed = [None if _is_missing(c) else c.strip() for c in cells]
        # numeric-coded categories (e.g. one-hot Gender_0/Gender_1) stay numeric
        if all(c is None or _parse_number(c) is not None for c in parsed):
            return [np.nan if c is None else float(c) for c in parsed]
        return parsed
    # identifiers are carried through verbatim
    return [None if _is_missing(c) else c.strip() for c in cells]


def write_csv(table: DataTable, path: str) -> str:
    """
    Save a DataTable to CSV, writing missing cells as NaN

    Returns:
        The path written
    """
    table.frame.to_csv(path, index=False, na_rep="NaN", float_format="%.17g")
    logger.info(f"Saved {table.n_rows} rows to {path}")
    return path
