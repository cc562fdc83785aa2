"""
Synthetic data for the tabular module
Two-class Gaussian tables and PhysioNet-layout cohorts with a realistic missingness profile
"""
import logging
import math
from typing import Dict, Optional

import numpy as np
import pandas as pd

from tabular.data import ColumnKind, DataTable
from utils.config import IDENTIFIER_COLUMN, PHYSIONET_COLUMNS, TARGET_COLUMN
from utils.errors import DataError

# Configure logging
logger = logging.getLogger(__name__)


def class_counts(n: int, positive_frac: float) -> int:
    """Number of positive rows, at least one of each class"""
    n_pos = int(round(n * positive_frac))
    return min(max(n_pos, 1), n - 1)


def synth_generate(n: int, d: int, positive_frac: float, separation: float, seed: int,
                   target: str = TARGET_COLUMN) -> DataTable:
    """
    Two-class Gaussian table

    Both classes have unit variance per feature; the positive class is shifted
    by `separation` along each of the first ceil(d/2) features, the rest is noise.

    Args:
        n: Row count (>= 2)
        d: Feature count (>= 1)
        positive_frac: Share of positive rows, strictly inside (0, 1)
        separation: Mean shift in pooled standard deviations (>= 0)
        seed: RNG seed
        target: Name of the appended target column

    Returns:
        DataTable with columns x1..xd and the target
    """
    if n < 2 or d < 1:
        raise DataError(f"synth_generate needs n >= 2 and d >= 1, got n={n}, d={d}")
    if not 0 < positive_frac < 1:
        raise DataError(f"positive_frac must be in (0, 1), got {positive_frac}")
    if separation < 0:
        raise DataError(f"separation must be nonnegative, got {separation}")

    rng = np.random.default_rng(seed)
    n_pos = class_counts(n, positive_frac)
    y = np.zeros(n)
    y[:n_pos] = 1.0
    X = rng.standard_normal((n, d))
    informative = math.ceil(d / 2)
    X[:n_pos, :informative] += separation

    order = rng.permutation(n)
    logger.info(f"Generated synthetic table: n={n}, d={d}, positives={n_pos}, separation={separation}")
    return DataTable.from_arrays(X[order], y[order], target=target)


# mean, sd, missing fraction, shift for positives (in sd units)
_PHYSIONET_PROFILE: Dict[str, tuple] = {
    "Hour": (25.0, 20.0, 0.00, 0.6),
    "HR": (84.0, 17.0, 0.10, 0.8),
    "O2Sat": (97.0, 3.0, 0.13, -0.3),
    "Temp": (36.9, 0.8, 0.66, 0.5),
    "SBP": (123.0, 23.0, 0.15, -0.4),
    "MAP": (82.0, 16.0, 0.12, -0.4),
    "DBP": (63.0, 14.0, 0.31, -0.3),
    "Resp": (18.7, 5.1, 0.15, 0.7),
    "EtCO2": (33.0, 7.9, 0.96, 0.0),
    "BaseExcess": (-0.7, 4.3, 0.95, 0.0),
    "HCO3": (24.1, 4.4, 0.96, 0.0),
    "FiO2": (0.55, 11.0, 0.92, 0.0),
    "pH": (7.38, 0.07, 0.93, 0.0),
    "PaCO2": (41.0, 9.3, 0.94, 0.0),
    "SaO2": (92.7, 10.9, 0.97, 0.0),
    "AST": (260.0, 855.0, 0.98, 0.0),
    "BUN": (23.9, 19.9, 0.93, 0.0),
    "Alkalinephos": (102.0, 120.0, 0.98, 0.0),
    "Calcium": (7.6, 2.4, 0.94, 0.0),
    "Chloride": (105.8, 5.9, 0.95, 0.0),
    "Creatinine": (1.5, 1.8, 0.94, 0.0),
    "Bilirubin_direct": (1.8, 3.8, 0.99, 0.0),
    "Glucose": (136.0, 51.0, 0.83, 0.0),
    "Lactate": (2.6, 2.6, 0.97, 0.0),
    "Magnesium": (2.1, 0.4, 0.94, 0.0),
    "Phosphate": (3.5, 1.4, 0.96, 0.0),
    "Potassium": (4.1, 0.6, 0.91, 0.0),
    "Bilirubin_total": (2.1, 4.3, 0.99, 0.0),
    "TroponinI": (8.3, 24.8, 0.99, 0.0),
    "Hct": (30.8, 5.5, 0.91, 0.0),
    "Hgb": (10.4, 2.0, 0.93, 0.0),
    "PTT": (41.2, 26.2, 0.97, 0.0),
    "WBC": (11.4, 7.7, 0.94, 0.0),
    "Fibrinogen": (287.0, 153.0, 0.99, 0.0),
    "Platelets": (196.0, 103.0, 0.94, 0.0),
    "Age": (62.0, 16.0, 0.00, 0.2),
    "Unit1": (0.5, 0.5, 0.45, 0.0),
    "Unit2": (0.5, 0.5, 0.45, 0.0),
    "HospAdmTime": (-56.0, 162.0, 0.00, 0.0),
    "ICULOS": (27.0, 29.0, 0.00, 0.6),
}


def synth_physionet(n: int, seed: int, positive_frac: float = 0.018, rows_per_patient: int = 20) -> DataTable:
    """
    Cohort in the PhysioNet 2019 layout with Gender delivered one-hot

    Missingness is placed on exact row counts so that precisely the vitals,
    demographics and time columns stay at or under 40% missing while labs and
    unit flags exceed it.

    Args:
        n: Row count
        seed: RNG seed
        positive_frac: Share of SepsisLabel = 1 rows
        rows_per_patient: Consecutive rows sharing a Patient_ID

    Returns:
        DataTable with 44 columns (Table 1 names, Gender split into Gender_0/Gender_1)
    """
    if n < 10:
        raise DataError(f"synth_physionet needs n >= 10, got {n}")
    rng = np.random.default_rng(seed)
    n_pos = class_counts(n, positive_frac)
    y = np.zeros(n)
    y[rng.choice(n, size=n_pos, replace=False)] = 1.0

    columns: Dict[str, np.ndarray] = {}
    kinds: Dict[str, ColumnKind] = {}
    for name in PHYSIONET_COLUMNS:
        if name == TARGET_COLUMN:
            columns[name] = y
            kinds[name] = ColumnKind.TARGET
        elif name == IDENTIFIER_COLUMN:
            columns[name] = np.array([f"p{i // rows_per_patient:06d}" for i in range(n)], dtype=object)
            kinds[name] = ColumnKind.IDENTIFIER
        elif name == "Gender":
            male = rng.random(n) < 0.56
            columns["Gender_0"] = (~male).astype(float)
            columns["Gender_1"] = male.astype(float)
            kinds["Gender_0"] = ColumnKind.CATEGORICAL
            kinds["Gender_1"] = ColumnKind.CATEGORICAL
        else:
            mean, sd, missing, shift = _PHYSIONET_PROFILE[name]
            values = rng.normal(mean, sd, n) + y * shift * sd
            if name in ("Unit1", "Unit2"):
                values = (values > mean).astype(float)
            n_missing = int(math.floor(missing * n))
            if n_missing:
                values[rng.choice(n, size=n_missing, replace=False)] = np.nan
            columns[name] = values
            kinds[name] = ColumnKind.CONTINUOUS

    frame = pd.DataFrame(columns)
    logger.info(f"Generated PhysioNet-layout cohort: {n} rows, {n_pos} septic rows")
    return DataTable(frame, kinds)


def synth_case(n: int, positive_frac: float, seed: int, d: int = 10, separation: float = 2.0,
               physionet: bool = False) -> DataTable:
    """Dataset for one experiment arm, Gaussian or PhysioNet-layout"""
    if physionet:
        return synth_physionet(n, seed, positive_frac=positive_frac)
    return synth_generate(n, d, positive_frac, separation, seed)


def describe(table: DataTable) -> Dict[str, Optional[float]]:
    """Row count and class mix, as printed in experiment table headers"""
    labels = table.labels()
    n_pos = int(labels.sum())
    return {
        "n_rows": table.n_rows,
        "positives": n_pos,
        "negatives": table.n_rows - n_pos,
        "positive_frac": n_pos / table.n_rows if table.n_rows else None,
    }
