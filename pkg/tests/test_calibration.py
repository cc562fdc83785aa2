import numpy as np
import pytest

import calibration.calibrate as calibrate_module
from calibration.alpha import DEFAULT_ALPHAS, alpha_tune
from calibration.calibrate import (REGEN, CalibrationConfig, _try_feature, calibrate, delineation_accuracy,
                                   regenerate, sweep_accuracies)
from evaluation.roc import auc_score
from scoring.scores import scoreset_from_scores
from utils.errors import ConfigError, DataError


def _noisy_dataset(seed, n=200, d=4):
    rng = np.random.default_rng(seed)
    X = rng.random((n, d))
    y = (X[:, 0] + 0.3 * rng.random(n) > 0.65).astype(int)
    return X, y


class TestCalibrate:
    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_never_below_baseline(self, seed):
        X, y = _noisy_dataset(seed)
        weights = np.array([0.1, 1.0, 1.0, 1.0])
        state = calibrate(weights, X, y, np.full(4, 0.25), CalibrationConfig(max_outer_iterations=3))
        assert state.current_accuracy >= state.baseline_accuracy
        assert state.current_accuracy == delineation_accuracy(X, state.current_weights, y)

    @pytest.mark.parametrize("seed", range(100))
    def test_accepted_steps_increase_on_random_datasets(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.random((500, 8))
        y = (X @ rng.random(8) + 0.5 * rng.random(500) > 2.25).astype(int)
        weights = rng.random(8) + 0.01
        state = calibrate(weights, X, y, rng.dirichlet(np.ones(8)), CalibrationConfig())
        last = state.baseline_accuracy
        for row in state.history:
            if row["target"] == REGEN:
                last = row["accuracy"]
                continue
            assert row["accuracy"] > last
            last = row["accuracy"]
        assert state.current_accuracy >= state.baseline_accuracy

    def test_sweep_underestimate_still_gets_exact_check(self, monkeypatch):
        X, y = _noisy_dataset(7)
        weights = np.array([0.1, 1.0, 1.0, 1.0])
        grid = CalibrationConfig().positive_grid
        current = delineation_accuracy(X, weights, y)
        expected = _try_feature(X, weights, y, 0, grid, current)
        assert expected is not None
        exact = sweep_accuracies(X, weights, y, 0, grid)
        # best approximation half a row below the current accuracy
        shifted = exact - (exact.max() - current) - 0.5 / len(y)
        monkeypatch.setattr(calibrate_module, "sweep_accuracies", lambda *args: shifted)
        found = _try_feature(X, weights, y, 0, grid, current)
        assert found == expected
        assert found[1] > current

    def test_raises_accuracy_when_signal_is_underweighted(self):
        X, y = _noisy_dataset(7)
        state = calibrate([0.1, 1.0, 1.0, 1.0], X, y, np.full(4, 0.25), CalibrationConfig(max_outer_iterations=4))
        assert state.current_accuracy > state.baseline_accuracy
        assert state.history

    def test_accepted_steps_strictly_improve(self):
        X, y = _noisy_dataset(5)
        state = calibrate([0.2, 1.0, 0.5, 1.0], X, y, [0.4, 0.2, 0.2, 0.2], CalibrationConfig(max_outer_iterations=4),
                          feature_names=["a", "b", "c", "d"])
        previous = state.baseline_accuracy
        for row in state.history:
            if row["target"] != REGEN:
                assert row["target"] in {"a", "b", "c", "d"}
                assert row["accuracy"] > previous
            previous = row["accuracy"]

    def test_deterministic_history(self):
        X, y = _noisy_dataset(9)
        config = CalibrationConfig(max_outer_iterations=3)
        first = calibrate([0.1, 1.0, 1.0, 1.0], X, y, np.full(4, 0.25), config)
        again = calibrate([0.1, 1.0, 1.0, 1.0], X, y, np.full(4, 0.25), config)
        assert first.history == again.history
        assert np.array_equal(first.current_weights, again.current_weights)

    def test_perfect_baseline_is_returned_unchanged(self):
        X = np.array([[0.1], [0.2], [0.8], [0.9]])
        state = calibrate([1.0], X, [0, 0, 1, 1], [1.0])
        assert state.current_accuracy == state.baseline_accuracy == 1.0
        assert state.history == []

    def test_invalid_weights(self):
        X, y = _noisy_dataset(0, n=20)
        with pytest.raises(DataError):
            calibrate(np.zeros(4), X, y, np.full(4, 0.25))
        with pytest.raises(DataError):
            calibrate([-1.0, 1.0, 1.0, 1.0], X, y, np.full(4, 0.25))
        with pytest.raises(DataError):
            calibrate(np.ones(4), X, y, np.full(3, 1 / 3))

    def test_config_grids(self):
        config = CalibrationConfig()
        assert config.positive_grid[0] == 1.05 and config.positive_grid[-1] == 2.0
        assert config.negative_grid[-1] == 0.0
        assert len(config.positive_grid) == 20
        with pytest.raises(ConfigError):
            CalibrationConfig(grid_step=0.0)
        with pytest.raises(ConfigError):
            CalibrationConfig(max_regens=-1)

    def test_sweep_agrees_with_direct_evaluation(self):
        X, y = _noisy_dataset(4)
        weights = np.array([0.3, 0.6, 0.2, 0.9])
        grid = [0.5, 1.5, 2.0]
        approx = sweep_accuracies(X, weights, y, 0, grid)
        for value, multiplier in zip(approx, grid):
            trial = weights.copy()
            trial[0] *= multiplier
            assert value == pytest.approx(delineation_accuracy(X, trial, y), abs=1.0 / len(y))

    def test_regenerate_boosts_top_five(self):
        refined = np.array([0.3, 0.2, 0.15, 0.15, 0.1, 0.1])
        counts = np.array([2.0, 1.0, 1.0, 1.0, 1.0, 6.0])
        out = regenerate(refined, counts)
        # the last feature ties with the fifth and loses the stable order
        expected = np.array([0.6, 0.2, 0.15, 0.15, 0.1, 0.1])
        assert out == pytest.approx(expected / expected.sum())
        assert out.sum() == pytest.approx(1.0)


class TestAlpha:
    def _train_scores(self):
        return scoreset_from_scores(np.array([0.2, 0.4]), [0, 1])

    def test_alpha_moves_row_across_benchmark(self):
        train_scores = self._train_scores()
        assert train_scores.benchmark == pytest.approx(0.30)
        result = alpha_tune(train_scores, np.array([[0.25]]), [1.0], [1], alphas=[1.0, 1.5])
        assert result.alpha == 1.5
        assert result.accuracy == 1.0
        assert result.sweep == ((1.0, 0.0), (1.5, 1.0))

    def test_ties_go_to_smallest_alpha(self):
        result = alpha_tune(self._train_scores(), np.array([[0.9], [0.1]]), [1.0], [1, 0])
        assert result.alpha == min(DEFAULT_ALPHAS)
        assert len(result.sweep) == len(DEFAULT_ALPHAS)

    def test_scaling_leaves_auc_unchanged(self):
        rng = np.random.default_rng(2)
        scores = rng.random(300)
        labels = (scores + rng.normal(scale=0.3, size=300) > 0.5).astype(int)
        base = auc_score(scores, labels)
        for alpha in DEFAULT_ALPHAS:
            assert auc_score(alpha * scores, labels) == pytest.approx(base, abs=1e-12)

    def test_empty_validation(self):
        with pytest.raises(DataError):
            alpha_tune(self._train_scores(), np.zeros((0, 1)), [1.0], [])

    def test_non_positive_grid(self):
        with pytest.raises(DataError):
            alpha_tune(self._train_scores(), np.array([[0.5]]), [1.0], [1], alphas=[0.0, 1.0])
