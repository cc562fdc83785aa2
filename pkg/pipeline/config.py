"""
Pipeline configuration document
A tree of dataclasses with defaults for every field, loaded from JSON and published as a schema
"""
import dataclasses
import hashlib
import json
import logging
import typing
from dataclasses import dataclass, field
from typing import Any, Dict, Tuple, Union

from calibration.alpha import DEFAULT_ALPHAS
from calibration.calibrate import CalibrationConfig
from insights.adjust import AdjustmentPolicy
from insights.forest import ForestConfig
from learners.boosting import GbtConfig
from learners.composite import ALGORITHMS, LearnerConfig
from network.search import SearchSpace
from tabular.splits import SplitSpec
from utils.config import DEFAULT_SEED, WORKERS
from utils.errors import ConfigError

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SplitConfig:
    train_frac: float = 0.7
    test_frac: float = 0.2
    val_frac: float = 0.1
    stratify: bool = True
    group_by_patient: bool = False

    def __post_init__(self):
        self.to_spec(0)

    def to_spec(self, seed: int) -> SplitSpec:
        return SplitSpec(self.train_frac, self.test_frac, self.val_frac, self.stratify, seed, self.group_by_patient)


@dataclass(frozen=True)
class CleaningConfig:
    sparse_threshold: float = 0.40

    def __post_init__(self):
        if not 0 < self.sparse_threshold < 1:
            raise ConfigError("cleaning.sparse_threshold must be in (0, 1)")


@dataclass(frozen=True)
class ScoringConfig:
    remap_lambda: float = 0.01

    def __post_init__(self):
        if self.remap_lambda < 0:
            raise ConfigError("scoring.remap_lambda must be nonnegative")


@dataclass(frozen=True)
class NetworkConfig:
    hidden_layers: Tuple[int, ...] = (1, 2, 3)
    widths: Tuple[int, ...] = (8, 16, 32)
    activations: Tuple[str, ...] = ("relu", "tanh")
    optimizers: Tuple[str, ...] = ("sgd", "momentum", "adaptive")
    learning_rates: Tuple[float, ...] = (0.1, 0.01, 0.001)
    batch_sizes: Tuple[int, ...] = (32, 128)
    epochs: Tuple[int, ...] = (50, 200)
    budget: int = 15
    folds: int = 3
    strategy: str = "gp"
    max_layers: int = 5

    def __post_init__(self):
        self.to_space(0)
        if self.max_layers < 1:
            raise ConfigError("network.max_layers must be >= 1")

    def to_space(self, seed: int) -> SearchSpace:
        return SearchSpace(self.hidden_layers, self.widths, self.activations, self.optimizers,
                           self.learning_rates, self.batch_sizes, self.epochs, self.budget, self.folds,
                           self.strategy, seed)


@dataclass(frozen=True)
class AlphaConfig:
    grid: Tuple[float, ...] = DEFAULT_ALPHAS

    def __post_init__(self):
        if not self.grid or min(self.grid) <= 0:
            raise ConfigError("alpha.grid must be nonempty and positive")


@dataclass(frozen=True)
class EvaluationConfig:
    n_boot: int = 1000
    level: float = 0.95

    def __post_init__(self):
        if self.n_boot < 100:
            raise ConfigError("evaluation.n_boot must be >= 100")
        if not 0 < self.level < 1:
            raise ConfigError("evaluation.level must be in (0, 1)")


@dataclass(frozen=True)
class InsightsConfig:
    p_up: float = 0.10
    p_down: float = 0.10
    target_class: int = 1
    n_trees: int = 25
    depth: int = 4
    min_leaf: int = 5
    feature_subsample: Union[str, int] = "sqrt"
    tie_class: int = 0

    def __post_init__(self):
        self.policy(1)
        self.forest(0)
        if self.target_class not in (0, 1):
            raise ConfigError("insights.target_class must be 0 or 1")

    def policy(self, correlation_sign: int) -> AdjustmentPolicy:
        return AdjustmentPolicy(self.p_up, self.p_down, correlation_sign)

    def forest(self, seed: int) -> ForestConfig:
        return ForestConfig(self.n_trees, self.depth, self.min_leaf, self.feature_subsample, True, seed,
                            self.tie_class)


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = DEFAULT_SEED
    workers: int = WORKERS
    split: SplitConfig = field(default_factory=SplitConfig)
    cleaning: CleaningConfig = field(default_factory=CleaningConfig)
    scoring: ScoringConfig = field(default_factory=ScoringConfig)
    learners: LearnerConfig = field(default_factory=LearnerConfig)
    network: NetworkConfig = field(default_factory=NetworkConfig)
    calibration: CalibrationConfig = field(default_factory=CalibrationConfig)
    alpha: AlphaConfig = field(default_factory=AlphaConfig)
    final: GbtConfig = field(default_factory=GbtConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)
    insights: InsightsConfig = field(default_factory=InsightsConfig)
    baselines: Dict[str, Dict[str, Dict[str, float]]] = field(default_factory=dict)

    def __post_init__(self):
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def stage_seed(self, stage: str) -> int:
        return derive_seed(self.seed, stage)

    def to_dict(self) -> Dict[str, Any]:
        return _to_plain(self)


def derive_seed(master: int, stage: str) -> int:
    """Stable 32-bit seed for one pipeline stage"""
    digest = hashlib.sha256(f"{master}:{stage}".encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def _to_plain(value: Any) -> Any:
    if dataclasses.is_dataclass(value):
        return {f.name: _to_plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, (tuple, list)):
        return [_to_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _to_plain(v) for k, v in value.items()}
    return value


def _build(cls, data: Any, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'} must be a JSON object")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"unknown keys in {where or 'config'}: {unknown}")
    kwargs = {}
    for name, value in data.items():
        hint = hints[name]
        path = f"{where}.{name}" if where else name
        if dataclasses.is_dataclass(hint):
            kwargs[name] = _build(hint, value, path)
        elif typing.get_origin(hint) is tuple:
            if not isinstance(value, list):
                raise ConfigError(f"{path} must be a list")
            kwargs[name] = tuple(value)
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid {where or 'config'}: {e}") from e


def config_from_dict(data: Dict[str, Any]) -> PipelineConfig:
    """Build a PipelineConfig, filling omitted fields with defaults"""
    return _build(PipelineConfig, data, "")


def load_config(path: str) -> PipelineConfig:
    """
    Read a JSON configuration document

    Args:
        path: Path to the JSON file

    Returns:
        Validated PipelineConfig
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    config = config_from_dict(data)
    logger.info(f"Loaded pipeline config from {path} (seed={config.seed})")
    return config


def _type_name(hint: Any) -> str:
    origin = typing.get_origin(hint)
    if origin is tuple:
        return f"list[{_type_name(typing.get_args(hint)[0])}]"
    if origin is Union:
        return " | ".join(_type_name(a) for a in typing.get_args(hint))
    if origin is dict:
        return "object"
    return getattr(hint, "__name__", str(hint))


def _schema_of(cls) -> Dict[str, Any]:
    hints = typing.get_type_hints(cls)
    default = cls()
    schema = {}
    for f in dataclasses.fields(cls):
        hint = hints[f.name]
        if dataclasses.is_dataclass(hint):
            schema[f.name] = {"type": "object", "properties": _schema_of(hint)}
        else:
            schema[f.name] = {"type": _type_name(hint), "default": _to_plain(getattr(default, f.name))}
    return schema


def config_schema() -> Dict[str, Any]:
    """Accepted keys with their types and defaults"""
    return {
        "type": "object",
        "additionalProperties": False,
        "properties": _schema_of(PipelineConfig),
        "learner_choices": list(ALGORITHMS),
    }
