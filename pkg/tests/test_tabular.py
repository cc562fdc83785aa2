import numpy as np
import pandas as pd
import pytest

from evaluation.roc import auc_score
from tabular.cleaning import drop_sparse_columns, fit_imputation, impute, missing_report
from tabular.data import ColumnKind, DataTable, load_csv, write_csv
from tabular.splits import SplitSpec, apportion, split, split_indices, stratified_kfold_indices
from tabular.synth import describe, synth_generate, synth_physionet
from utils.config import PHYSIONET_COLUMNS, RETAINED_COLUMNS
from utils.errors import ConfigError, DataError


class TestLoadCsv:
    def test_structure_and_missing_cell(self, write_csv_text):
        path = write_csv_text("a,b,c,SepsisLabel\n1,2,3,0\n4,,6,1\n7,8,9,0\n")
        table = load_csv(path)
        assert table.n_rows == 3
        assert table.n_cols == 4
        assert int(table.missing_mask.to_numpy().sum()) == 1
        assert bool(table.missing_mask.loc[1, "b"])

    def test_missing_tokens_are_case_insensitive(self, write_csv_text):
        path = write_csv_text("a,SepsisLabel\nNaN,0\nna,1\n2,0\n")
        table = load_csv(path)
        assert int(table.missing_mask["a"].sum()) == 2

    def test_physionet_header(self, write_csv_text):
        header = ",".join(PHYSIONET_COLUMNS)
        row = ",".join("1" if name != "SepsisLabel" else "0" for name in PHYSIONET_COLUMNS)
        table = load_csv(write_csv_text(f"{header}\n{row}\n{row}\n"))
        assert len(PHYSIONET_COLUMNS) == 43
        assert table.n_cols == 43
        assert table.target_name == "SepsisLabel"
        assert table.kinds["Patient_ID"] == ColumnKind.IDENTIFIER
        assert "Patient_ID" not in table.feature_names

    def test_non_binary_target(self, write_csv_text):
        with pytest.raises(DataError, match="non-binary target"):
            load_csv(write_csv_text("a,SepsisLabel\n1,0\n2,2\n"))

    def test_ragged_rows(self, write_csv_text):
        with pytest.raises(DataError, match="ragged"):
            load_csv(write_csv_text("a,b,SepsisLabel\n1,2,0\n1,1\n"))

    def test_duplicate_header(self, write_csv_text):
        with pytest.raises(DataError, match="duplicate"):
            load_csv(write_csv_text("a,a,SepsisLabel\n1,2,0\n"))

    def test_absent_target(self, write_csv_text):
        path = write_csv_text("a,b\n1,2\n3,4\n")
        with pytest.raises(DataError, match="absent"):
            load_csv(path)
        unlabeled = load_csv(path, require_target=False)
        assert not unlabeled.has_labels()
        assert unlabeled.feature_names == ["a", "b"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="cannot read"):
            load_csv(str(tmp_path / "absent.csv"))

    def test_parse_error_in_hinted_continuous_column(self, write_csv_text):
        path = write_csv_text("a,SepsisLabel\n1,0\nabc,1\n")
        with pytest.raises(DataError, match="parse error"):
            load_csv(path, schema={"a": "continuous"})

    def test_write_then_load_keeps_values(self, tmp_path, separable_table):
        path = str(tmp_path / "t.csv")
        write_csv(separable_table, path)
        loaded = load_csv(path)
        assert np.array_equal(loaded.matrix(), separable_table.matrix())
        assert np.array_equal(loaded.labels(), separable_table.labels())


class TestCleaning:
    def _table_with_missing(self, fractions):
        n = 100
        data = {}
        for name, frac in fractions.items():
            values = np.arange(n, dtype=float)
            values[:int(round(frac * n))] = np.nan
            data[name] = values
        data["SepsisLabel"] = np.arange(n) % 2
        return DataTable.from_arrays(pd.DataFrame(data).drop(columns="SepsisLabel").to_numpy(),
                                     data["SepsisLabel"], list(fractions))

    def test_threshold_is_inclusive(self):
        table = self._table_with_missing({"sparse": 0.41, "kept": 0.39, "exact": 0.40})
        cleaned, dropped = drop_sparse_columns(table, 0.40)
        assert dropped == ["sparse"]
        assert cleaned.feature_names == ["kept", "exact"]

    def test_no_missing_is_identity(self, separable_table):
        cleaned, dropped = drop_sparse_columns(separable_table)
        assert dropped == []
        assert cleaned.columns == separable_table.columns

    def test_no_features_survive(self):
        table = self._table_with_missing({"a": 0.9, "b": 0.8})
        with pytest.raises(DataError, match="no features survive threshold"):
            drop_sparse_columns(table, 0.4)

    def test_physionet_profile_keeps_fourteen_columns(self):
        table = synth_physionet(2000, seed=3)
        cleaned, dropped = drop_sparse_columns(table, 0.40)
        assert set(cleaned.columns) == set(RETAINED_COLUMNS)
        assert len(cleaned.columns) == 14
        assert "Temp" in dropped and "Lactate" in dropped

    def test_impute_mean_and_mode(self, mixed_table):
        filled, stats = impute(mixed_table)
        assert filled.frame["age"].tolist() == pytest.approx([1.0, 8.0 / 3.0, 3.0, 4.0])
        assert filled.frame["unit"].tolist() == ["A", "A", "A", "B"]
        assert stats.methods == {"age": "mean", "unit": "mode"}
        assert not filled.missing_mask[filled.feature_names].to_numpy().any()

    def test_impute_simple_mean(self):
        table = DataTable.from_arrays(np.array([[1.0], [np.nan], [3.0]]), [0, 1, 0], ["x"])
        filled, stats = impute(table)
        assert filled.frame["x"].tolist() == [1.0, 2.0, 3.0]
        assert stats.fills["x"] == 2.0

    def test_impute_without_missing_is_identity(self, separable_table):
        filled, _ = impute(separable_table)
        assert filled.frame.equals(separable_table.frame)

    def test_fully_missing_column(self):
        table = DataTable.from_arrays(np.array([[np.nan], [np.nan]]), [0, 1], ["x"])
        with pytest.raises(DataError, match="fully missing"):
            fit_imputation(table)

    def test_stats_round_trip_through_dict(self, mixed_table):
        _, stats = impute(mixed_table)
        restored = type(stats).from_dict(stats.to_dict())
        assert restored.apply(mixed_table).frame.equals(stats.apply(mixed_table).frame)

    def test_missing_report(self):
        table = self._table_with_missing({"sparse": 0.5, "kept": 0.1})
        cleaned, dropped = drop_sparse_columns(table)
        report = missing_report(table, dropped, fit_imputation(cleaned))
        assert report["dropped"] == {"sparse": 0.5}
        assert "kept" in report["retained"]


class TestSplits:
    def test_exact_stratified_proportions(self):
        labels = np.array([1] * 20 + [0] * 80)
        parts = split_indices(labels, SplitSpec(seed=1))
        assert [len(p) for p in parts] == [70, 20, 10]
        assert [int(labels[p].sum()) for p in parts] == [14, 4, 2]

    def test_partition_is_exact(self):
        rng = np.random.default_rng(0)
        for trial in range(20):
            n = int(rng.integers(10, 200))
            labels = np.zeros(n, dtype=int)
            labels[:max(3, n // 4)] = 1
            parts = split_indices(labels, SplitSpec(seed=trial))
            joined = np.concatenate(parts)
            assert sorted(joined.tolist()) == list(range(n))

    def test_seed_determinism(self):
        labels = np.array([1] * 30 + [0] * 70)
        first = split_indices(labels, SplitSpec(seed=5))
        again = split_indices(labels, SplitSpec(seed=5))
        other = split_indices(labels, SplitSpec(seed=6))
        assert all(np.array_equal(a, b) for a, b in zip(first, again))
        assert not all(np.array_equal(a, b) for a, b in zip(first, other))
        assert [int(labels[p].sum()) for p in first] == [int(labels[p].sum()) for p in other]

    def test_cannot_stratify(self):
        labels = np.array([1, 1] + [0] * 20)
        with pytest.raises(DataError, match="cannot stratify"):
            split_indices(labels, SplitSpec())

    def test_split_spec_validation(self):
        with pytest.raises(ConfigError):
            SplitSpec(0.5, 0.3, 0.3)
        with pytest.raises(ConfigError):
            SplitSpec(1.0, 0.0, 0.0)

    def test_apportion_largest_remainder(self):
        assert apportion(10, (0.7, 0.2, 0.1)) == [7, 2, 1]
        assert sum(apportion(7, (0.7, 0.2, 0.1))) == 7

    def test_patient_grouped_split(self):
        table = synth_physionet(400, seed=2, positive_frac=0.5, rows_per_patient=10)
        cleaned, _ = drop_sparse_columns(table)
        parts = split(cleaned, SplitSpec(seed=4, group_by_patient=True))
        patients = [set(p.frame["Patient_ID"]) for p in parts]
        assert not patients[0] & patients[1]
        assert not patients[0] & patients[2]
        assert sum(p.n_rows for p in parts) == 400

    def test_kfold_forced_balance(self):
        labels = np.array([1] * 5 + [0] * 5)
        folds = stratified_kfold_indices(labels, 5, seed=0)
        assert len(folds) == 5
        for fit_idx, held in folds:
            assert len(held) == 2
            assert int(labels[held].sum()) == 1
            assert not set(fit_idx) & set(held)

    def test_kfold_holdouts_partition_rows(self):
        labels = np.array([1] * 13 + [0] * 40)
        folds = stratified_kfold_indices(labels, 4, seed=3)
        held = np.concatenate([h for _, h in folds])
        assert sorted(held.tolist()) == list(range(53))

    def test_kfold_two_by_two(self):
        labels = np.array([1, 0, 1, 0])
        for _, held in stratified_kfold_indices(labels, 2, seed=9):
            assert sorted(labels[held].tolist()) == [0, 1]

    def test_kfold_too_many_folds(self):
        with pytest.raises(DataError):
            stratified_kfold_indices(np.array([1, 1, 0, 0, 0, 0]), 3, seed=0)


def _holdout_auc(table: DataTable) -> float:
    """AUC of a mean-difference direction fitted on the first half and scored on the second"""
    X, y = table.matrix(), table.labels()
    half = len(y) // 2
    direction = X[:half][y[:half] == 1].mean(axis=0) - X[:half][y[:half] == 0].mean(axis=0)
    return auc_score(X[half:] @ direction, y[half:])


class TestSynth:
    def test_positive_count(self):
        table = synth_generate(2000, 10, 0.02, 2.0, seed=1)
        assert describe(table)["positives"] == 40
        assert table.feature_names == [f"x{j}" for j in range(1, 11)]

    def test_deterministic(self):
        a = synth_generate(100, 3, 0.3, 1.0, seed=4)
        b = synth_generate(100, 3, 0.3, 1.0, seed=4)
        assert a.frame.equals(b.frame)

    def test_separation_shifts_first_half(self):
        table = synth_generate(4000, 4, 0.5, 2.0, seed=8)
        X, y = table.matrix(), table.labels()
        gap = X[y == 1].mean(axis=0) - X[y == 0].mean(axis=0)
        assert gap[:2] == pytest.approx([2.0, 2.0], abs=0.15)
        assert gap[2:] == pytest.approx([0.0, 0.0], abs=0.15)

    @pytest.mark.parametrize("seed", range(20))
    def test_zero_separation_is_indistinguishable(self, seed):
        table = synth_generate(2000, 10, 0.3, 0.0, seed=seed)
        assert 0.4 < _holdout_auc(table) < 0.6

    def test_large_separation_is_nearly_perfect(self):
        for seed in range(5):
            assert _holdout_auc(synth_generate(2000, 10, 0.3, 4.0, seed=seed)) >= 0.99

    def test_preconditions(self):
        with pytest.raises(DataError):
            synth_generate(1, 3, 0.5, 1.0, seed=0)
        with pytest.raises(DataError):
            synth_generate(10, 3, 0.0, 1.0, seed=0)
