import math

import numpy as np
import pytest

from learners.boosting import GbtConfig, GbtModel, fit_gbt
from learners.complement_nb import complement_log_weights, fit_complement_nb
from learners.composite import (ALGORITHMS, AlgorithmWeights, FeatureWeightSet, LearnerConfig, composite_weights,
                                fit_learners, top5_importance)
from learners.lasso import fit_lasso, lambda_max, soft_threshold
from learners.mutual_info import mutual_information
from learners.pca import fit_pca
from utils.errors import ConfigError, DataError


def _orthonormal_design(rng, n, d):
    A = rng.standard_normal((n, d))
    A -= A.mean(axis=0)
    Q, _ = np.linalg.qr(A)
    return math.sqrt(n) * Q


def _power_iteration(cov, iterations=5000):
    """Leading eigenpairs by repeated multiplication with deflation"""
    cov = cov.copy()
    values, vectors = [], []
    rng = np.random.default_rng(0)
    for _ in range(cov.shape[0]):
        v = rng.standard_normal(cov.shape[0])
        v /= np.linalg.norm(v)
        for _ in range(iterations):
            w = cov @ v
            norm = np.linalg.norm(w)
            if norm == 0:
                break
            v = w / norm
        lam = float(v @ cov @ v)
        values.append(lam)
        vectors.append(v)
        cov = cov - lam * np.outer(v, v)
    return np.array(values), np.column_stack(vectors)


class TestLasso:
    def test_ols_limit(self):
        x = np.linspace(-1, 1, 21)
        fit = fit_lasso(x[:, None], 2 * x, 0.0)
        assert fit.coef[0] == pytest.approx(2.0, abs=1e-6)
        assert fit.converged

    def test_soft_threshold_example(self):
        rng = np.random.default_rng(1)
        X = _orthonormal_design(rng, 40, 1)
        fit = fit_lasso(X, X[:, 0] * 1.0, 0.3)
        assert fit.coef[0] == pytest.approx(0.7, abs=1e-6)

    def test_matches_closed_form_on_orthonormal_designs(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n, d = int(rng.integers(10, 40)), int(rng.integers(1, 6))
            X = _orthonormal_design(rng, n, d)
            y = X @ rng.normal(0, 1, d) + rng.normal(0, 0.5, n)
            lam = float(rng.uniform(0, 1))
            ols = X.T @ (y - y.mean()) / n
            expected = np.array([soft_threshold(b, lam) for b in ols])
            assert np.max(np.abs(fit_lasso(X, y, lam).coef - expected)) <= 1e-6

    def test_null_point(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((30, 4))
        y = X[:, 0] + rng.standard_normal(30)
        fit = fit_lasso(X, y, lambda_max(X, y) * 1.0001)
        assert np.all(fit.coef == 0)

    def test_rejects_non_finite(self):
        with pytest.raises(DataError):
            fit_lasso(np.array([[1.0], [np.nan]]), np.array([0.0, 1.0]), 0.1)


class TestComplementNaiveBayes:
    def test_hand_computed_smoothing(self):
        X = np.array([[3.0, 1.0], [1.0, 3.0]])
        weights = fit_complement_nb(X, np.array([1, 0]))
        assert weights == pytest.approx([-math.log(2), math.log(2)])
        w = complement_log_weights(X, np.array([1, 0]))
        assert w[1] == pytest.approx([math.log(2 / 6), math.log(4 / 6)])

    def test_identical_feature_has_no_weight(self):
        X = np.array([[1.0], [1.0], [1.0], [1.0]])
        assert fit_complement_nb(X, np.array([0, 1, 0, 1]))[0] == pytest.approx(0.0)

    def test_exchangeable_features(self):
        rng = np.random.default_rng(4)
        col = rng.random(50)
        weights = fit_complement_nb(np.column_stack([col, col]), rng.integers(0, 2, 50))
        assert abs(weights[0]) == pytest.approx(abs(weights[1]))

    def test_negative_input(self):
        with pytest.raises(DataError, match="nonnegative"):
            fit_complement_nb(np.array([[-1.0], [1.0]]), np.array([0, 1]))


class TestBoosting:
    def _separable(self, n=200, seed=5):
        rng = np.random.default_rng(seed)
        y = (rng.random(n) < 0.4).astype(int)
        X = rng.standard_normal((n, 4))
        X[:, 2] = y * 3.0 + rng.random(n)
        return X, y

    def test_separating_feature_dominates(self):
        X, y = self._separable()
        model = fit_gbt(X, y)
        assert model.importances[2] >= 0.9
        assert model.importances.sum() == pytest.approx(1.0)

    def test_null_model(self):
        X, y = self._separable()
        model = fit_gbt(X, y, GbtConfig(n_trees=0))
        assert model.importances == pytest.approx([0.25] * 4)
        prior = y.mean()
        assert model.decision_function(X) == pytest.approx(np.full(len(y), math.log(prior / (1 - prior))))

    def test_pure_children_stop_growing(self):
        X, y = self._separable()
        model = fit_gbt(X, y, GbtConfig(n_trees=1, depth=3))
        tree = model.trees[0]
        assert tree.feature[0] == 2
        assert len(tree.value) == 3

    def test_training_loss_non_increasing(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((300, 3))
        y = (X[:, 0] + 0.5 * rng.standard_normal(300) > 0).astype(int)
        losses = fit_gbt(X, y, GbtConfig(n_trees=30)).train_loss
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_single_class(self):
        with pytest.raises(DataError):
            fit_gbt(np.ones((10, 2)), np.zeros(10))

    def test_serialization_predicts_identically(self):
        X, y = self._separable()
        model = fit_gbt(X, y, GbtConfig(n_trees=5))
        restored = GbtModel.from_dict(model.to_dict())
        assert np.array_equal(restored.predict_proba(X), model.predict_proba(X))

    def test_invalid_config(self):
        with pytest.raises(ConfigError):
            GbtConfig(depth=0)


class TestMutualInformation:
    def test_constant_feature(self):
        assert mutual_information(np.ones((20, 1)), np.arange(20) % 2)[0] == 0.0

    def test_binary_copy_of_target(self):
        y = np.array([0, 1] * 50)
        assert mutual_information(y[:, None].astype(float), y)[0] == pytest.approx(math.log(2))

    def test_permutation_invariant(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((100, 3))
        y = (X[:, 1] > 0).astype(int)
        perm = rng.permutation(100)
        assert np.allclose(mutual_information(X, y), mutual_information(X[perm], y[perm]))
        assert (mutual_information(X, y) >= 0).all()

    def test_bins_validation(self):
        with pytest.raises(DataError):
            mutual_information(np.ones((4, 1)), np.array([0, 1, 0, 1]), bins=1)


class TestPca:
    def test_axis_case(self):
        X = np.column_stack([np.arange(10, dtype=float), np.zeros(10), np.zeros(10)])
        result = fit_pca(X)
        assert np.abs(result.first_loading) == pytest.approx([1.0, 0.0, 0.0])

    def test_diagonal_covariance(self):
        # columns with variance 2 and 1, uncorrelated
        a = np.array([1.0, -1.0, 1.0, -1.0]) * math.sqrt(1.5)
        b = np.array([1.0, 1.0, -1.0, -1.0]) * math.sqrt(0.75)
        result = fit_pca(np.column_stack([a, b]))
        assert result.explained_variance == pytest.approx([2.0, 1.0])
        assert np.abs(result.first_loading) == pytest.approx([1.0, 0.0], abs=1e-12)

    def test_matches_power_iteration(self):
        rng = np.random.default_rng(8)
        for d in range(1, 6):
            # well separated spectrum so the power method converges
            Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
            cov = Q @ np.diag(np.arange(d, 0, -1, dtype=float) * 2.0) @ Q.T
            X = rng.multivariate_normal(np.zeros(d), cov, size=200)
            result = fit_pca(X)
            centered = X - X.mean(axis=0)
            values, vectors = _power_iteration(centered.T @ centered / (X.shape[0] - 1))
            assert result.explained_variance == pytest.approx(values, abs=1e-6)
            for k in range(d):
                assert min(np.max(np.abs(result.loadings[:, k] - vectors[:, k])),
                           np.max(np.abs(result.loadings[:, k] + vectors[:, k]))) <= 1e-6

    def test_orthonormal_and_sorted(self):
        rng = np.random.default_rng(9)
        result = fit_pca(rng.standard_normal((50, 4)))
        assert np.allclose(result.loadings.T @ result.loadings, np.eye(4), atol=1e-8)
        assert (np.diff(result.explained_variance) <= 0).all()

    def test_no_variance_gives_zero_weights(self):
        assert fit_pca(np.ones((5, 3))).feature_weights().tolist() == [0.0, 0.0, 0.0]


class TestComposite:
    features = ("a", "b", "c", "d", "e", "f")

    def test_from_raw_normalizes_and_ranks(self):
        weights = AlgorithmWeights.from_raw("lasso", self.features, [0.0, -3.0, 1.0, 1.0, 0.5, 0.5])
        assert weights.normalized.sum() == pytest.approx(1.0)
        assert weights.normalized[1] == pytest.approx(0.5)
        assert weights.top5 == ("b", "c", "d", "e", "f")

    def test_all_zero_raw_is_uniform(self):
        weights = AlgorithmWeights.from_raw("pca", self.features, np.zeros(6))
        assert weights.normalized == pytest.approx([1 / 6] * 6)

    def test_single_algorithm(self):
        weights = AlgorithmWeights.from_raw("gbt", self.features, [1, 2, 3, 4, 5, 5])
        result = composite_weights([weights])
        assert result.composite == pytest.approx(weights.normalized)

    def test_order_invariance_and_retention(self):
        first = AlgorithmWeights.from_raw("lasso", self.features, [1, 0, 2, 0, 1, 1])
        second = AlgorithmWeights.from_raw("mutual_info", self.features, [1, 0, 1, 1, 1, 1])
        forward = composite_weights([first, second])
        backward = composite_weights([second, first])
        assert np.array_equal(forward.composite, backward.composite)
        assert "b" not in forward.retained
        assert forward.composite.sum() == pytest.approx(1.0)

    def test_top5_counts(self):
        lists = [("a", "b", "c"), ("a", "c"), ("a",), (), ("x",)]
        counts = top5_importance(lists, ["a", "b", "c", "d"])
        assert counts.tolist() == [4, 2, 3, 1]

    def test_few_features_in_every_list(self):
        names = ("p", "q", "r")
        per_algorithm = [AlgorithmWeights.from_raw(a, names, [1.0, 2.0, 3.0]) for a in ALGORITHMS]
        assert composite_weights(per_algorithm).importance_counts.tolist() == [6, 6, 6]

    def test_fit_learners(self, separable_table):
        X = separable_table.matrix()
        X = (X - X.min(axis=0)) / (X.max(axis=0) - X.min(axis=0))
        result = fit_learners(X, separable_table.labels(), separable_table.feature_names)
        assert [a.algorithm for a in result.algorithms] == sorted(ALGORITHMS)
        assert result.composite.sum() == pytest.approx(1.0)
        assert (result.importance_counts >= 1).all()
        # informative features are the first half
        assert result.composite[:3].sum() > result.composite[3:].sum()
        restored = FeatureWeightSet.from_dict(result.to_dict())
        assert np.array_equal(restored.composite, result.composite)

    def test_fit_learners_is_thread_count_independent(self, separable_table):
        X = np.clip(separable_table.matrix() / 6 + 0.5, 0, 1)
        y = separable_table.labels()
        single = fit_learners(X, y, separable_table.feature_names, workers=1)
        threaded = fit_learners(X, y, separable_table.feature_names, workers=4)
        assert np.array_equal(single.composite, threaded.composite)

    def test_learner_config_validation(self):
        with pytest.raises(ConfigError):
            LearnerConfig(enabled=())
        with pytest.raises(ConfigError):
            LearnerConfig(enabled=("svm",))
