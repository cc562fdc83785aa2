"""
Actionable insights for a trained artifact: adjust, fit the forest, extract pathways
"""
import logging
from typing import Any, Dict, Optional, Tuple

from insights.adjust import adjust_features
from insights.forest import fit_random_forest
from insights.formatter import render_recommendations
from insights.paths import extract_target_path
from pipeline.artifact import ModelArtifact
from pipeline.config import InsightsConfig
from pipeline.scoring import score_rows
from scoring.scores import benchmark_view
from tabular.data import DataTable
from utils.errors import ArtifactError, DataError

# Configure logging
logger = logging.getLogger(__name__)


def run_insights(artifact: ModelArtifact, table: DataTable, config: Optional[InsightsConfig] = None,
                 seed: int = 0, workers: int = 1) -> Tuple[str, Dict[str, Any]]:
    """
    Build the insights report for labelled rows

    The adjusted copy of the table feeds only the forest; the artifact is left untouched.

    Args:
        artifact: Trained model supplying imputation, weight signs and the benchmark
        table: Labelled rows with the artifact's feature columns
        config: Adjustment percentages and forest parameters
        seed: Forest seed
        workers: Thread count for tree fitting

    Returns:
        (text, payload) of the recommendations report
    """
    config = config or InsightsConfig()
    if not table.has_labels():
        raise DataError("insights need a label on every row")
    missing = [name for name in artifact.features if name not in table.kinds]
    if missing:
        raise ArtifactError(f"missing required column(s) {missing}")

    features = list(artifact.features)
    filled = artifact.imputation.apply(table.select(features + [table.target_name]))
    policy = config.policy(artifact.orientation)
    adjusted = adjust_features(filled, artifact.feature_signs, policy)
    labels = table.labels().astype(int)

    forest = fit_random_forest(adjusted.matrix(features), labels, features, config.forest(seed), workers)
    target_path = extract_target_path(forest, config.target_class)
    try:
        counter_path = extract_target_path(forest, 1 - config.target_class)
    except DataError:
        logger.warning(f"No pathway for class {1 - config.target_class}; reporting the target pathway only")
        counter_path = None

    scored = score_rows(artifact, table)
    context = benchmark_view(scored.sxi_score, artifact.benchmark, artifact.orientation, labels)
    positive_rate = float(labels.mean())
    text, payload = render_recommendations(target_path, policy, context, counter_path, artifact.feature_signs,
                                           prior_rates=(1.0 - positive_rate, positive_rate))
    payload["forest"] = config.forest(seed).to_dict()
    payload["n_rows"] = table.n_rows
    return text, payload
