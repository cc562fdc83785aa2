"""
Scoring and evaluation of rows with a frozen model artifact
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd

from evaluation.report import evaluate_dataset
from pipeline.artifact import ModelArtifact
from scoring.normalization import normalize_matrix
from scoring.scores import flag_scores, score_matrix
from tabular.data import DataTable
from tabular.synth import describe
from utils.errors import ArtifactError, DataError

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScoredRows:
    sxi_score: np.ndarray
    flag: np.ndarray
    probability: np.ndarray

    def to_frame(self, row_ids: Optional[Sequence] = None) -> pd.DataFrame:
        ids = list(range(self.sxi_score.size)) if row_ids is None else list(row_ids)
        return pd.DataFrame({
            "row_id": ids,
            "sxi_score": self.sxi_score,
            "flag": self.flag,
            "probability": self.probability,
        })


def normalized_matrix(artifact: ModelArtifact, rows: DataTable) -> np.ndarray:
    """
    Impute with the stored statistics and normalize with the stored map

    Extra columns are ignored; a missing modeled column is an error.
    """
    missing = [name for name in artifact.features if name not in rows.kinds]
    if missing:
        raise ArtifactError(f"missing required column(s) {missing}")
    subset = rows.select(artifact.features + [rows.target_name])
    filled = artifact.imputation.apply(subset)
    X_raw = filled.matrix(artifact.features)
    if np.isnan(X_raw).any():
        raise DataError("rows still contain missing cells after imputation")
    return normalize_matrix(X_raw, artifact.normalization)


def score_rows(artifact: ModelArtifact, rows: DataTable) -> ScoredRows:
    """
    Per-row SXI++ score, benchmark flag and final-classifier probability

    Args:
        artifact: Trained model (not modified)
        rows: Table containing at least the artifact's feature columns

    Returns:
        ScoredRows aligned with the input rows
    """
    X = normalized_matrix(artifact, rows)
    sxi = artifact.alpha * score_matrix(X, artifact.weights)
    flags = flag_scores(sxi, artifact.benchmark, artifact.orientation)
    probability = artifact.final_model.predict_proba(np.column_stack([X, sxi]))
    logger.info(f"Scored {rows.n_rows} rows ({int(flags.sum())} flagged)")
    return ScoredRows(sxi, flags, probability)


def evaluate_rows(artifact: ModelArtifact, rows: DataTable, n_boot: int = 1000, level: float = 0.95,
                  seed: int = 0, workers: int = 1) -> Dict[str, Any]:
    """Score labelled rows and build their evaluation block"""
    labels = rows.labels()
    scored = score_rows(artifact, rows)
    return evaluate_dataset(scored.probability, scored.sxi_score, scored.flag, labels, describe(rows),
                            artifact.orientation, n_boot, level, seed, workers)
