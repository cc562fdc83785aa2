import numpy as np
import pandas as pd
import pytest

from evaluation.bootstrap import bootstrap_ci
from evaluation.formatter import (comparison_frame, describe_dataset, export_comparison_excel, format_cell,
                                  format_comparison, format_evaluation)
from evaluation.metrics import ConfusionMatrix, classification_metrics, confusion
from evaluation.report import METRIC_ROWS, evaluate_dataset, metric_rows
from evaluation.roc import auc_score, roc_auc
from utils.errors import DataError


def _pair_statistic(scores, labels):
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    return wins / (pos.size * neg.size)


def _accuracy(pred, labels):
    return classification_metrics(confusion(pred, labels))["accuracy"]


class TestConfusion:
    def test_perfect_predictions(self):
        labels = [1, 1, 1, 0, 0]
        assert confusion(labels, labels) == ConfusionMatrix(tp=3, tn=2, fp=0, fn=0)

    def test_complement(self):
        labels = np.array([1, 0, 1, 0])
        cm = confusion(1 - labels, labels)
        assert cm.tp == 0 and cm.tn == 0

    def test_mixed_case(self):
        assert confusion([1, 1, 0], [1, 0, 0]) == ConfusionMatrix(tp=1, tn=1, fp=1, fn=0)

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            confusion([1, 0], [1])


class TestClassificationMetrics:
    def test_perfect(self):
        metrics = classification_metrics(ConfusionMatrix(tp=5, tn=5, fp=0, fn=0))
        assert metrics["accuracy"] == metrics["precision"] == metrics["recall"] == 1.0
        assert metrics["fpr"] == 0.0

    def test_half_precision(self):
        metrics = classification_metrics(ConfusionMatrix(tp=1, tn=0, fp=1, fn=0))
        assert metrics["precision"] == 0.5
        assert metrics["accuracy"] == 0.5
        assert metrics["specificity"] == 0.0

    def test_undefined_ratios_are_absent(self):
        metrics = classification_metrics(ConfusionMatrix(tp=0, tn=4, fp=0, fn=0))
        assert metrics["precision"] is None
        assert metrics["recall"] is None
        assert metrics["npv"] == 1.0

    def test_accuracy_identity(self):
        rng = np.random.default_rng(0)
        pred, labels = rng.integers(0, 2, 97), rng.integers(0, 2, 97)
        cm = confusion(pred, labels)
        assert round(classification_metrics(cm)["accuracy"] * cm.total) == cm.tp + cm.tn

    def test_empty_matrix(self):
        with pytest.raises(DataError):
            classification_metrics(ConfusionMatrix(0, 0, 0, 0))


class TestRoc:
    def test_hand_example(self):
        scores = np.array([0.8, 0.4, 0.6, 0.2])
        labels = np.array([1, 1, 0, 0])
        assert auc_score(scores, labels) == pytest.approx(0.75)

    def test_separated_and_constant(self):
        assert auc_score([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
        assert auc_score([0.5] * 4, [0, 1, 0, 1]) == 0.5

    def test_matches_pair_statistic(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            n = int(rng.integers(2, 51))
            labels = rng.integers(0, 2, n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            # rounding creates ties
            scores = np.round(rng.random(n), 1)
            assert auc_score(scores, labels) == pytest.approx(_pair_statistic(scores, labels), abs=1e-9)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(1)
        scores = rng.normal(size=200)
        labels = (scores + rng.normal(size=200) > 0).astype(int)
        base = auc_score(scores, labels)
        assert auc_score(scores ** 3, labels) == pytest.approx(base, abs=1e-12)
        assert auc_score(1.3 * scores, labels) == pytest.approx(base, abs=1e-12)

    def test_curve_invariants(self):
        rng = np.random.default_rng(3)
        curve = roc_auc(rng.random(50), np.arange(50) % 2)
        curve.check()
        assert curve.to_dict()["points"][0] == [0.0, 0.0]

    def test_single_class(self):
        with pytest.raises(DataError, match="both classes"):
            roc_auc([0.1, 0.2], [1, 1])


class TestBootstrap:
    def test_constant_metric(self):
        labels = np.array([0, 1] * 25)
        assert bootstrap_ci(_accuracy, labels, labels, n_boot=200, seed=1) == (1.0, 1.0)

    def test_interval_contains_point(self):
        rng = np.random.default_rng(7)
        hits = 0
        for trial in range(100):
            labels = rng.integers(0, 2, 120)
            pred = np.where(rng.random(120) < 0.8, labels, 1 - labels)
            low, high = bootstrap_ci(_accuracy, pred, labels, n_boot=100, seed=trial)
            hits += low <= _accuracy(pred, labels) <= high
        assert hits >= 99

    def test_seeded_and_worker_independent(self):
        rng = np.random.default_rng(2)
        scores, labels = rng.random(80), rng.integers(0, 2, 80)
        single = bootstrap_ci(auc_score, scores, labels, n_boot=150, seed=4)
        threaded = bootstrap_ci(auc_score, scores, labels, n_boot=150, seed=4, workers=4)
        assert single == threaded

    def test_percentile_levels(self):
        rng = np.random.default_rng(5)
        pred, labels = rng.integers(0, 2, 60), rng.integers(0, 2, 60)
        wide = bootstrap_ci(_accuracy, pred, labels, n_boot=300, level=0.99, seed=0)
        narrow = bootstrap_ci(_accuracy, pred, labels, n_boot=300, level=0.5, seed=0)
        assert wide[0] <= narrow[0] <= narrow[1] <= wide[1]

    def test_argument_checks(self):
        with pytest.raises(DataError):
            bootstrap_ci(_accuracy, [1, 0], [1, 0], n_boot=50)
        with pytest.raises(DataError):
            bootstrap_ci(_accuracy, [1, 0], [1, 0], level=1.0)


def _evaluation(seed=0, n=60):
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    probabilities = np.clip(labels * 0.6 + rng.random(n) * 0.5, 0, 1)
    descriptor = {"n_rows": n, "positives": int(labels.sum()), "negatives": int(n - labels.sum())}
    return evaluate_dataset(probabilities, probabilities, (probabilities >= 0.5).astype(int), labels, descriptor,
                            n_boot=100, seed=seed)


class TestReport:
    def test_rows_follow_table_order(self):
        evaluation = _evaluation()
        assert [row["metric"] for row in evaluation["rows"]] == [key for key, _ in METRIC_ROWS]
        for row in evaluation["rows"]:
            assert row["low"] <= row["point"] <= row["high"]
        assert sum(evaluation["confusion"].values()) == 60

    def test_single_class_dataset_has_no_auc(self):
        rows = metric_rows([0.2, 0.7, 0.9], [1, 1, 1], n_boot=100)
        by_metric = {row["metric"]: row for row in rows}
        assert by_metric["auc"]["point"] is None
        assert by_metric["specificity"]["point"] is None
        assert by_metric["recall"]["point"] == pytest.approx(2 / 3)


class TestFormatter:
    def test_cell_layout(self):
        row = {"metric": "accuracy", "point": 0.9999, "low": 0.9998, "high": 1.0}
        assert format_cell(row) == "99.99 (99.98 - 100.00)"
        assert format_cell({"metric": "auc", "point": 0.99, "low": 0.98, "high": 1.0}) == "0.99 (0.98 - 1.00)"
        assert format_cell({"metric": "precision", "point": None, "low": None, "high": None}) == "n/a"

    def test_dataset_header(self):
        header = describe_dataset({"n_rows": 50000, "positives": 1000, "negatives": 49000})
        assert header == "50,000 (Sepsis: 1000, No Sepsis: 49000)"

    def test_evaluation_text(self):
        text = format_evaluation(_evaluation(), "Test split")
        assert text.startswith("Test split: 60 (Sepsis: 30, No Sepsis: 30)")
        assert "Precision (PPV)" in text
        assert "Confusion: TP=" in text

    def _case(self):
        return {
            "name": "Case 1",
            "train": {"n_rows": 100, "positives": 30, "negatives": 70},
            "columns": [{"name": "LNM-1", "evaluation": _evaluation(1)},
                        {"name": "LNM-2", "evaluation": _evaluation(2)}],
            "baselines": {"AutoML": {"accuracy": 95.1, "auc": 0.93}},
        }

    def test_comparison_frame(self):
        frame = comparison_frame(self._case())
        assert list(frame.index) == [label for _, label in METRIC_ROWS]
        assert frame.shape == (len(METRIC_ROWS), 3)
        assert frame["AutoML"].tolist()[0] == "95.1"
        text = format_comparison([self._case()])
        assert text.startswith("Case 1: trained on 100 (Sepsis: 30, No Sepsis: 70)")

    def test_excel_export(self, tmp_path):
        path = str(tmp_path / "out" / "experiment.xlsx")
        assert export_comparison_excel([self._case()], path) == path
        sheet = pd.read_excel(path, sheet_name="Case 1", index_col=0)
        assert sheet.shape == (len(METRIC_ROWS), 3)
