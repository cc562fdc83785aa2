import numpy as np
import pytest

from insights.adjust import AdjustmentPolicy, adjust_features
from insights.forest import ClassificationTree, ForestConfig, RandomForest, fit_random_forest
from insights.formatter import render_recommendations, render_rule
from insights.paths import Condition, RulePath, extract_target_path, merge_conditions
from scoring.scores import scoreset_from_scores
from tabular.data import DataTable
from utils.errors import ConfigError, DataError


def _threshold_data(n=500, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.random((n, 2))
    y = (X[:, 0] > 0.6).astype(int)
    return X, y


def _stump(n0, n1):
    tree = ClassificationTree()
    tree.add_node((n0, n1))
    return tree


class TestAdjustment:
    def test_positive_correlation_multipliers(self):
        policy = AdjustmentPolicy(p_up=0.1, p_down=0.2, correlation_sign=1)
        assert policy.multiplier(1) == pytest.approx(1.1)
        assert policy.multiplier(-1) == pytest.approx(0.8)
        assert policy.multiplier(0) == 1.0

    def test_negative_correlation_swaps_roles(self):
        policy = AdjustmentPolicy(p_up=0.1, p_down=0.2, correlation_sign=-1)
        assert policy.multiplier(1) == pytest.approx(0.8)
        assert policy.multiplier(-1) == pytest.approx(1.1)

    def test_policy_validation(self):
        with pytest.raises(ConfigError):
            AdjustmentPolicy(p_up=1.0)
        with pytest.raises(ConfigError):
            AdjustmentPolicy(p_down=-0.1)
        with pytest.raises(ConfigError):
            AdjustmentPolicy(correlation_sign=0)

    def test_adjust_features(self):
        X = np.array([[10.0, 10.0, 10.0], [20.0, 20.0, 20.0]])
        table = DataTable.from_arrays(X, [0, 1], ["a", "b", "c"])
        adjusted = adjust_features(table, {"a": 0.4, "b": -2.0, "unknown": 1}, AdjustmentPolicy(0.1, 0.2, 1))
        assert adjusted.frame["a"].tolist() == pytest.approx([11.0, 22.0])
        assert adjusted.frame["b"].tolist() == pytest.approx([8.0, 16.0])
        assert adjusted.frame["c"].tolist() == [10.0, 20.0]
        assert adjusted.labels().tolist() == [0, 1]
        assert table.frame["a"].tolist() == [10.0, 20.0]


class TestForest:
    def test_depth_is_bounded(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(300, 5))
        y = (X[:, 0] * X[:, 1] + 0.5 * rng.normal(size=300) > 0).astype(int)
        forest = fit_random_forest(X, y, config=ForestConfig(n_trees=10, depth=4, seed=3))
        assert len(forest.trees) == 10
        assert all(tree.max_depth() <= 4 for tree in forest.trees)
        for tree in forest.trees:
            assert all(len(conditions) <= 4 for _, conditions in tree.leaf_paths())

    def test_majority_vote_and_ties(self):
        X = np.zeros((1, 1))
        config = ForestConfig(n_trees=3)
        forest = RandomForest(config, ("x1",), [_stump(0, 5), _stump(0, 5), _stump(5, 0)], X, np.array([1]))
        assert forest.predict(X).tolist() == [1]
        tied = RandomForest(ForestConfig(n_trees=2, tie_class=1), ("x1",), [_stump(0, 5), _stump(5, 0)], X,
                            np.array([1]))
        assert tied.predict(X).tolist() == [1]
        assert _stump(3, 3).node_class(0) == 0

    def test_worker_count_does_not_change_trees(self):
        X, y = _threshold_data(200, seed=4)
        config = ForestConfig(n_trees=6, seed=8)
        single = fit_random_forest(X, y, config=config)
        threaded = fit_random_forest(X, y, config=config, workers=3)
        assert [t.threshold for t in single.trees] == [t.threshold for t in threaded.trees]

    def test_input_checks(self):
        with pytest.raises(DataError, match="both classes"):
            fit_random_forest(np.zeros((10, 2)), np.ones(10))
        X = np.zeros((4, 1))
        X[0, 0] = np.nan
        with pytest.raises(DataError, match="non-finite"):
            fit_random_forest(X, [0, 1, 0, 1])
        with pytest.raises(ConfigError):
            ForestConfig(depth=0)
        with pytest.raises(ConfigError):
            ForestConfig(feature_subsample="log2")


class TestPaths:
    def test_recovers_threshold_rule(self):
        X, y = _threshold_data()
        config = ForestConfig(n_trees=5, feature_subsample="all", bootstrap=False, seed=1)
        forest = fit_random_forest(X, y, ["F", "G"], config)
        path = extract_target_path(forest, 1)
        assert path.purity >= 0.99
        assert path.conditions[0].feature == "F"
        assert path.conditions[0].comparator == ">"
        assert path.conditions[0].threshold == pytest.approx(0.6, abs=0.02)
        assert path.coverage == int(y.sum())

    def test_bootstrapped_forest_keeps_a_pure_rule(self):
        X, y = _threshold_data(1000, seed=2)
        forest = fit_random_forest(X, y, ["F", "G"], ForestConfig(n_trees=15, feature_subsample="all", seed=5))
        path = extract_target_path(forest, 1)
        assert path.purity >= 0.99
        assert "F" in {c.feature for c in path.conditions}

    def test_counter_class_path(self):
        X, y = _threshold_data()
        forest = fit_random_forest(X, y, ["F", "G"], ForestConfig(n_trees=3, feature_subsample="all",
                                                                  bootstrap=False))
        path = extract_target_path(forest, 0)
        assert path.leaf_class == 0
        assert path.conditions[0].comparator == "<="

    def test_invalid_target_class(self):
        X, y = _threshold_data(50)
        forest = fit_random_forest(X, y, config=ForestConfig(n_trees=1))
        with pytest.raises(DataError):
            extract_target_path(forest, 2)

    def test_merge_keeps_tightest_bounds(self):
        merged = merge_conditions([Condition("F", ">", 1.0), Condition("F", "<=", 10.0), Condition("F", ">", 3.0),
                                   Condition("G", "<=", 2.0), Condition("F", "<=", 8.0)])
        assert merged == (Condition("F", ">", 3.0), Condition("F", "<=", 8.0), Condition("G", "<=", 2.0))


class TestRendering:
    def test_interval_and_single_bounds(self):
        path = RulePath(merge_conditions([Condition("SBP", ">", 220.0), Condition("Age", ">", 42.0),
                                          Condition("Age", "<=", 72.0)]), 1, 1.0, 12, 0)
        assert render_rule(path) == "SBP > 220 AND 42 ≤ Age ≤ 72 → Sepsis"

    def test_empty_rule(self):
        assert render_rule(RulePath((), 0, 0.9, 100, 2)) == "(all rows) → No Sepsis"

    def test_recommendations_payload(self):
        path = RulePath((Condition("HR", ">", 100.0),), 1, 0.95, 40, 3)
        counter = RulePath((Condition("HR", "<=", 100.0),), 0, 0.9, 60, 1)
        scores = scoreset_from_scores(np.array([0.2, 0.4, 0.6, 0.8]), [0, 0, 1, 1])
        text, payload = render_recommendations(path, AdjustmentPolicy(0.1, 0.1, 1), scores, counter,
                                               {"HR": 1, "O2Sat": -1}, prior_rates=(0.6, 0.4))
        assert "HR > 100 → Sepsis" in text
        assert "HR ≤ 100 → No Sepsis" in text
        assert "HR: x1.1" in text
        assert payload["target_path"]["conditions"] == [{"feature": "HR", "comparator": ">", "threshold": 100.0}]
        assert payload["adjustments"] == {"HR": pytest.approx(1.1), "O2Sat": pytest.approx(0.9)}
        assert payload["flagged_share"] == 0.5
        assert payload["prior_rates"] == [0.6, 0.4]

    def test_prior_rate_line_for_unconditioned_path(self):
        scores = scoreset_from_scores(np.array([0.1, 0.9]))
        text, _ = render_recommendations(RulePath((), 1, 0.4, 10, 0), AdjustmentPolicy(), scores,
                                         prior_rates=(0.6, 0.4))
        assert "Prior-rate rule: 40.0% of training rows are Sepsis" in text
