"""
Imbalance protocol: train once per use case, evaluate on two unseen sets
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from pipeline.artifact import ModelArtifact
from pipeline.config import PipelineConfig, config_from_dict, derive_seed
from pipeline.scoring import evaluate_rows
from pipeline.train import train_pipeline
from tabular.data import DataTable, load_csv
from tabular.synth import describe, synth_case
from utils.errors import ConfigError, DataError

# Configure logging
logger = logging.getLogger(__name__)

UNSEEN_NAMES = ("LNM-1", "LNM-2")


@dataclass(frozen=True)
class DatasetSpec:
    """One dataset of a case: a CSV file, or a synthetic draw of `n` rows"""
    n: int = 2000
    positive_frac: float = 0.3
    path: Optional[str] = None

    def __post_init__(self):
        if self.path is None:
            if self.n < 10:
                raise ConfigError(f"dataset size must be >= 10, got {self.n}")
            if not 0 < self.positive_frac < 1:
                raise ConfigError(f"positive_frac must be in (0, 1), got {self.positive_frac}")


@dataclass(frozen=True)
class CaseSpec:
    name: str
    train: DatasetSpec
    unseen: Tuple[DatasetSpec, ...]
    d: int = 10
    separation: float = 2.0
    physionet: bool = False
    baselines: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.unseen:
            raise ConfigError(f"case {self.name} needs at least one unseen dataset")
        if len(self.unseen) > len(UNSEEN_NAMES):
            raise ConfigError(f"case {self.name} has more than {len(UNSEEN_NAMES)} unseen datasets")


def default_cases(n_train: int = 2000, n_unseen: int = 5000) -> List[CaseSpec]:
    """The three use cases' class mixes at desk scale"""
    mixes = (("Case 1", 0.306, 0.02), ("Case 2", 0.02, 0.02), ("Case 3", 0.30, 0.018))
    return [
        CaseSpec(name, DatasetSpec(n_train, train_frac),
                 (DatasetSpec(n_unseen, unseen_frac), DatasetSpec(n_unseen, unseen_frac)))
        for name, train_frac, unseen_frac in mixes
    ]


def case_from_dict(data: Dict[str, Any]) -> CaseSpec:
    try:
        train = DatasetSpec(**data["train"])
        unseen = tuple(DatasetSpec(**u) for u in data["unseen"])
        extra = {k: data[k] for k in ("d", "separation", "physionet", "baselines") if k in data}
        return CaseSpec(data["name"], train, unseen, **extra)
    except KeyError as e:
        raise ConfigError(f"case descriptor is missing {e}") from e
    except TypeError as e:
        raise ConfigError(f"invalid case descriptor: {e}") from e


def load_cases(path: str) -> Tuple[PipelineConfig, List[CaseSpec]]:
    """
    Read an experiment document

    Format: {"config": {...pipeline config...}, "cases": [{"name", "train": {...}, "unseen": [...]}, ...]}.
    Without "cases" the three default use cases are run.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read experiment file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"experiment file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"experiment file {path} must hold a JSON object")
    config = config_from_dict(data.get("config", {}))
    cases = [case_from_dict(c) for c in data["cases"]] if "cases" in data else default_cases()
    return config, cases


def build_dataset(spec: DatasetSpec, case: CaseSpec, seed: int) -> DataTable:
    if spec.path is not None:
        return load_csv(spec.path)
    return synth_case(spec.n, spec.positive_frac, seed, case.d, case.separation, case.physionet)


def _check_trainable(case: CaseSpec, table: DataTable) -> None:
    counts = describe(table)
    if counts["positives"] == 0 or counts["negatives"] == 0:
        raise DataError(f"{case.name}: training data needs both classes "
                        f"(positives={counts['positives']}, negatives={counts['negatives']})")


def run_case(case: CaseSpec, config: PipelineConfig) -> Tuple[ModelArtifact, Dict[str, Any]]:
    """Train on the case's training set and evaluate on each unseen set"""
    seed = config.seed
    train_table = build_dataset(case.train, case, derive_seed(seed, f"{case.name}:train"))
    unseen = [build_dataset(spec, case, derive_seed(seed, f"{case.name}:unseen:{i}"))
              for i, spec in enumerate(case.unseen)]
    _check_trainable(case, train_table)
    for table in unseen:
        if not table.has_labels():
            raise DataError(f"{case.name}: unseen datasets need a label on every row")

    logger.info(f"🚀 {case.name}: training on {train_table.n_rows} rows")
    artifact, _ = train_pipeline(train_table, config)
    columns = []
    for i, table in enumerate(unseen):
        evaluation = evaluate_rows(artifact, table, config.evaluation.n_boot, config.evaluation.level,
                                   derive_seed(seed, f"{case.name}:bootstrap:{i}"), config.workers)
        columns.append({"name": UNSEEN_NAMES[i], "evaluation": evaluation})
    baselines = dict(config.baselines.get(case.name, {}))
    baselines.update(case.baselines)
    return artifact, {"name": case.name, "train": describe(train_table), "columns": columns,
                      "baselines": baselines}


def run_experiment(config: PipelineConfig, cases: Optional[List[CaseSpec]] = None) -> Dict[str, Any]:
    """
    Run every use case

    All descriptors and training sets are validated before the first model is fitted.

    Args:
        config: Pipeline configuration shared by the cases
        cases: Case descriptors (defaults to the three use cases)

    Returns:
        {"cases": [...]} in the layout evaluation.formatter renders
    """
    cases = cases if cases is not None else default_cases()
    names = [c.name for c in cases]
    if len(set(names)) != len(names):
        raise ConfigError(f"case names must be unique, got {names}")
    for case in cases:
        if case.train.path is None:
            continue
        _check_trainable(case, load_csv(case.train.path))

    results = []
    for case in cases:
        _, result = run_case(case, config)
        results.append(result)
    logger.info(f"✅ Experiment finished: {len(results)} case(s)")
    return {"cases": results}
