"""
Model artifact: everything needed to score new rows, persisted as checksummed JSON
"""
import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from learners.boosting import GbtModel
from learners.composite import FeatureWeightSet
from network.model import NetworkParams, NetworkSpec
from scoring.normalization import NormalizationMap
from tabular.cleaning import ImputationStats
from utils.config import ARTIFACT_SCHEMA_VERSION
from utils.errors import ArtifactError
from utils.report_util import dumps, ensure_parent

# Configure logging
logger = logging.getLogger(__name__)

CHECKSUM_KEY = "checksum"
EVALUATION_KEY = "evaluation"


@dataclass
class ModelArtifact:
    features: List[str]
    target: str
    dropped: List[str]
    imputation: ImputationStats
    normalization: NormalizationMap
    remap_coefficients: Optional[List[float]]
    weight_set: FeatureWeightSet
    feature_signs: Dict[str, int]
    network_spec: NetworkSpec
    network_params: NetworkParams
    search: Dict[str, Any]
    refined_weights: np.ndarray
    calibration: Dict[str, Any]
    weights: np.ndarray
    alpha: float
    alpha_sweep: Dict[str, Any]
    benchmark: float
    orientation: int
    final_model: GbtModel
    training_scores: np.ndarray
    seeds: Dict[str, int]
    config: Dict[str, Any]
    evaluation: Dict[str, Any] = field(default_factory=dict)
    schema_version: int = ARTIFACT_SCHEMA_VERSION

    def to_payload(self) -> Dict[str, Any]:
        """JSON-able document without the checksum"""
        return {
            "schema_version": self.schema_version,
            "features": list(self.features),
            "target": self.target,
            "dropped": list(self.dropped),
            "imputation": self.imputation.to_dict(),
            "normalization": self.normalization.to_dict(),
            "remap_coefficients": self.remap_coefficients,
            "weight_set": self.weight_set.to_dict(),
            "feature_signs": dict(self.feature_signs),
            "network": {"spec": self.network_spec.to_dict(), "params": self.network_params.to_dict()},
            "search": self.search,
            "refined_weights": self.refined_weights.tolist(),
            "calibration": self.calibration,
            "weights": self.weights.tolist(),
            "alpha": self.alpha,
            "alpha_sweep": self.alpha_sweep,
            "benchmark": self.benchmark,
            "orientation": self.orientation,
            "final_model": self.final_model.to_dict(),
            "training_scores": self.training_scores.tolist(),
            "seeds": dict(self.seeds),
            "config": self.config,
            EVALUATION_KEY: self.evaluation,
        }

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "ModelArtifact":
        features = list(payload["features"])
        norm = NormalizationMap.from_dict(payload["normalization"])
        # JSON sorts keys; restore the modeled feature order
        norm = NormalizationMap({name: norm[name] for name in features})
        return cls(
            features=features,
            target=payload["target"],
            dropped=list(payload["dropped"]),
            imputation=ImputationStats.from_dict(payload["imputation"]),
            normalization=norm,
            remap_coefficients=payload["remap_coefficients"],
            weight_set=FeatureWeightSet.from_dict(payload["weight_set"]),
            feature_signs={k: int(v) for k, v in payload["feature_signs"].items()},
            network_spec=NetworkSpec.from_dict(payload["network"]["spec"]),
            network_params=NetworkParams.from_dict(payload["network"]["params"]),
            search=payload["search"],
            refined_weights=np.asarray(payload["refined_weights"], dtype=float),
            calibration=payload["calibration"],
            weights=np.asarray(payload["weights"], dtype=float),
            alpha=float(payload["alpha"]),
            alpha_sweep=payload["alpha_sweep"],
            benchmark=float(payload["benchmark"]),
            orientation=int(payload["orientation"]),
            final_model=GbtModel.from_dict(payload["final_model"]),
            training_scores=np.asarray(payload["training_scores"], dtype=float),
            seeds={k: int(v) for k, v in payload["seeds"].items()},
            config=payload["config"],
            evaluation=payload.get(EVALUATION_KEY, {}),
            schema_version=int(payload["schema_version"]),
        )


def payload_checksum(payload: Dict[str, Any]) -> str:
    body = {k: v for k, v in payload.items() if k != CHECKSUM_KEY}
    return hashlib.sha256(dumps(body).encode("utf-8")).hexdigest()


def artifact_bytes(artifact: ModelArtifact) -> bytes:
    """Exact bytes save_artifact writes"""
    payload = artifact.to_payload()
    payload[CHECKSUM_KEY] = payload_checksum(payload)
    return (dumps(payload) + "\n").encode("utf-8")


def model_bytes(artifact: ModelArtifact) -> bytes:
    """Serialized model without the evaluation block"""
    payload = artifact.to_payload()
    payload.pop(EVALUATION_KEY)
    return dumps(payload).encode("utf-8")


def save_artifact(artifact: ModelArtifact, path: str) -> str:
    """
    Write the artifact as schema-versioned JSON with an embedded sha256 checksum

    Args:
        artifact: Trained model
        path: Output file

    Returns:
        The path written
    """
    ensure_parent(path)
    with open(path, "wb") as f:
        f.write(artifact_bytes(artifact))
    logger.info(f"Saved model artifact to {path}")
    return path


def load_artifact(path: str) -> ModelArtifact:
    """
    Read and verify an artifact

    The schema version is checked before the checksum.

    Args:
        path: Artifact file

    Returns:
        ModelArtifact
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except OSError as e:
        raise ArtifactError(f"cannot read artifact {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ArtifactError(f"corrupted artifact {path}: {e}") from e
    if not isinstance(payload, dict):
        raise ArtifactError(f"corrupted artifact {path}: not a JSON object")

    version = payload.get("schema_version")
    if version != ARTIFACT_SCHEMA_VERSION:
        raise ArtifactError(f"unsupported version {version} (this build reads version {ARTIFACT_SCHEMA_VERSION})")
    stored = payload.get(CHECKSUM_KEY)
    if stored is None or stored != payload_checksum(payload):
        raise ArtifactError(f"checksum mismatch in {path}; the artifact was modified or corrupted")
    try:
        artifact = ModelArtifact.from_payload(payload)
    except (KeyError, TypeError, ValueError) as e:
        raise ArtifactError(f"corrupted artifact {path}: {e}") from e
    logger.info(f"Loaded model artifact from {path} ({len(artifact.features)} features)")
    return artifact
