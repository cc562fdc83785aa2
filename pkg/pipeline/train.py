"""
End-to-end training: score, refine with the network, correlate and calibrate, then fit the final classifier
"""
import logging
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from calibration.alpha import alpha_tune
from calibration.calibrate import calibrate
from evaluation.report import evaluate_dataset
from learners.boosting import fit_gbt
from learners.composite import fit_learners
from learners.lasso import fit_lasso
from network.model import init_custom
from network.saliency import drop_inputs, extract_feature_weights
from network.search import hyperparameter_search
from network.training import train as train_network
from pipeline.artifact import ModelArtifact
from pipeline.config import PipelineConfig
from pipeline.scoring import score_rows
from scoring.normalization import fit_normalization, normalize
from scoring.remap import lasso_remap_with_coefficients
from scoring.scores import benchmark_report, bivariate_weights, compute_scores, score_matrix, scoreset_from_scores
from tabular.cleaning import drop_sparse_columns, impute
from tabular.data import DataTable
from tabular.splits import split
from tabular.synth import describe
from utils.errors import DataError, StageError

# Configure logging
logger = logging.getLogger(__name__)

STAGES = ("clean", "split", "impute", "normalize", "bivariate", "remap", "learners", "network_search",
          "network_train", "calibrate", "alpha", "final", "evaluate")


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Attach the stage name to any failure raised inside the block"""
    logger.info(f"▶️ Stage {name}")
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        logger.error(f"Stage {name} failed: {e}", exc_info=True)
        raise StageError(name, e) from e


def _check_labels(table: DataTable, what: str) -> np.ndarray:
    labels = table.labels()
    if labels.size == 0:
        raise DataError(f"{what} split is empty")
    return labels


def fit_from_splits(train: DataTable, test: DataTable, val: DataTable, config: PipelineConfig,
                    dropped: Optional[List[str]] = None) -> Tuple[ModelArtifact, Dict[str, Any]]:
    """
    Fit every model stage on the training split

    Test labels are read only by the evaluation stage; validation labels only
    by alpha tuning and evaluation.

    Args:
        train: Training rows (sparse columns already dropped)
        test: Test rows
        val: Validation rows
        config: Pipeline configuration
        dropped: Columns removed by the sparsity rule (recorded in the artifact)

    Returns:
        Tuple of (artifact, training report)
    """
    workers = config.workers
    seeds = {name: config.stage_seed(name) for name in ("split", "network", "evaluation")}

    with stage("impute"):
        y = _check_labels(train, "training")
        if y.min() == y.max():
            raise DataError("training split holds a single class")
        train_imp, stats = impute(train)
        features = train_imp.feature_names
        if not features:
            raise DataError("no feature columns to model")

    with stage("normalize"):
        first_map = fit_normalization(train_imp, features)
        norm_train = normalize(train_imp, first_map)

    with stage("bivariate"):
        bivariate = bivariate_weights(norm_train, features)
        start_weights = bivariate.weights if bivariate.weights.any() else np.ones(len(features))
        initial = compute_scores(norm_train, start_weights, y, features)

    with stage("remap"):
        norm_map, remap_coef = lasso_remap_with_coefficients(train_imp, norm_train, initial.flags, first_map,
                                                             config.scoring.remap_lambda)
        X = normalize(train_imp, norm_map).matrix(features)

    with stage("learners"):
        weight_set = fit_learners(X, y, features, config.learners, workers)
        lasso_coef = fit_lasso(X, y.astype(float), config.learners.lasso_lambda).coef
        feature_signs = {name: int(np.sign(c)) for name, c in zip(features, lasso_coef)}
        composite = weight_set.composite
        score0 = score_matrix(X, composite)

    with stage("network_search"):
        X_net = np.column_stack([X, score0])
        importance = np.append(weight_set.importance_counts, 1).astype(float)
        space = config.network.to_space(seeds["network"])
        search = hyperparameter_search(space, X_net, y, importance, workers=workers)

    with stage("network_train"):
        spec = search.spec
        params = train_network(spec, init_custom(spec, importance), X_net, y)
        refined = drop_inputs(extract_feature_weights(params, config.network.max_layers), [len(features)])

    with stage("calibrate"):
        state = calibrate(composite, X, y, refined, config.calibration, weight_set.importance_counts, features)
        weights = state.current_weights
        train_scores = scoreset_from_scores(score_matrix(X, weights), y)

    with stage("alpha"):
        y_val = _check_labels(val, "validation")
        X_val = normalize(stats.apply(val), norm_map).matrix(features)
        alpha_result = alpha_tune(train_scores, X_val, weights, y_val, config.alpha.grid)
        alpha = alpha_result.alpha

    with stage("final"):
        training_scores = alpha * score_matrix(X, weights)
        final_model = fit_gbt(np.column_stack([X, training_scores]), y, config.final)

    artifact = ModelArtifact(
        features=list(features),
        target=train.target_name,
        dropped=list(dropped or []),
        imputation=stats,
        normalization=norm_map,
        remap_coefficients=None if remap_coef is None else remap_coef.tolist(),
        weight_set=weight_set,
        feature_signs=feature_signs,
        network_spec=spec,
        network_params=params,
        search=search.to_dict(),
        refined_weights=refined,
        calibration=state.to_dict(),
        weights=weights,
        alpha=alpha,
        alpha_sweep=alpha_result.to_dict(),
        benchmark=train_scores.benchmark,
        orientation=train_scores.orientation,
        final_model=final_model,
        training_scores=training_scores,
        seeds=seeds,
        config=config.to_dict(),
    )

    with stage("evaluate"):
        evaluation = {}
        for offset, (name, part) in enumerate((("test", test), ("validation", val))):
            labels = _check_labels(part, name)
            scored = score_rows(artifact, part)
            evaluation[name] = evaluate_dataset(scored.probability, scored.sxi_score, scored.flag, labels,
                                                describe(part), artifact.orientation, config.evaluation.n_boot,
                                                config.evaluation.level, seeds["evaluation"] + offset, workers)
        artifact.evaluation = evaluation

    report = {
        "datasets": {"train": describe(train), "test": describe(test), "validation": describe(val)},
        "dropped": list(dropped or []),
        "features": list(features),
        "imputation": stats.to_dict(),
        "bivariate_weights": bivariate.as_dict(),
        "initial_scores": initial.to_dict(),
        "remap_coefficients": artifact.remap_coefficients,
        "feature_weights": weight_set.to_dict(),
        "search": search.to_dict(),
        "network_log": params.log,
        "refined_weights": dict(zip(features, refined.tolist())),
        "calibration": state.to_dict(),
        "alpha": alpha_result.to_dict(),
        "benchmark": benchmark_report(train_scores, y),
        "final_model": {"importances": final_model.importances.tolist(), "train_loss": final_model.train_loss},
        "evaluation": evaluation,
    }
    logger.info(f"✅ Training complete: alpha={alpha}, benchmark={train_scores.benchmark:.6f}, "
                f"test AUC={_auc_of(evaluation['test'])}")
    return artifact, report


def _auc_of(evaluation: Dict[str, Any]) -> Optional[float]:
    for row in evaluation["rows"]:
        if row["metric"] == "auc":
            return row["point"]
    return None


def train_pipeline(table: DataTable, config: PipelineConfig) -> Tuple[ModelArtifact, Dict[str, Any]]:
    """
    Clean, split and fit the full pipeline

    Args:
        table: Labelled table
        config: Pipeline configuration

    Returns:
        Tuple of (artifact, training report); identical inputs give identical bytes
    """
    with stage("clean"):
        if not table.has_labels():
            raise DataError("training table needs a label on every row")
        cleaned, dropped = drop_sparse_columns(table, config.cleaning.sparse_threshold)

    with stage("split"):
        train_part, test_part, val_part = split(cleaned, config.split.to_spec(config.stage_seed("split")))

    return fit_from_splits(train_part, test_part, val_part, config, dropped)
