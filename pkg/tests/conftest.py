"""Shared fixtures for the test suite"""
import os
import sys

import numpy as np
import pandas as pd
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from pipeline.config import config_from_dict  # noqa: E402
from tabular.data import ColumnKind, DataTable  # noqa: E402
from tabular.synth import synth_generate  # noqa: E402


@pytest.fixture
def write_csv_text(tmp_path):
    """Write raw CSV text to a temporary file and return its path"""
    def write(text: str, name: str = "data.csv") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


@pytest.fixture
def separable_table() -> DataTable:
    return synth_generate(n=400, d=6, positive_frac=0.3, separation=3.0, seed=11)


@pytest.fixture
def mixed_table() -> DataTable:
    frame = pd.DataFrame({
        "age": [1.0, np.nan, 3.0, 4.0],
        "unit": ["A", "A", None, "B"],
        "SepsisLabel": [0.0, 1.0, 0.0, 1.0],
    })
    kinds = {"age": ColumnKind.CONTINUOUS, "unit": ColumnKind.CATEGORICAL, "SepsisLabel": ColumnKind.TARGET}
    return DataTable(frame, kinds)


@pytest.fixture(scope="session")
def fast_config():
    """Pipeline configuration small enough for end-to-end tests"""
    return config_from_dict({
        "seed": 7,
        "network": {"hidden_layers": [1], "widths": [8], "activations": ["tanh"], "optimizers": ["adaptive"],
                    "learning_rates": [0.01], "batch_sizes": [64], "epochs": [40], "budget": 1, "folds": 2},
        "calibration": {"max_outer_iterations": 2, "max_regens": 1},
        "final": {"n_trees": 30, "depth": 3},
        "evaluation": {"n_boot": 100},
        "insights": {"n_trees": 10},
    })
