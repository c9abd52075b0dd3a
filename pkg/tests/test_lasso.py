"""
Unit tests for coordinate-descent lasso.
"""

import numpy as np
import pytest

from src.core.errors import DimensionMismatchError
from src.model.lasso import (
    GramStats,
    LassoState,
    cd_sweep,
    eta_grid,
    fit_path,
    lasso_objective,
    path_objective,
    soft_threshold,
)


def _problem(n: int = 200, p: int = 8, seed: int = 0):
    rng = np.random.default_rng(seed)
    features = rng.normal(size=(n, p))
    beta = np.zeros(p)
    beta[:3] = [2.0, -1.0, 0.5]
    y = 1.0 + features @ beta + 0.3 * rng.normal(size=n)
    return features, y


def _fista(features: np.ndarray, y: np.ndarray, eta: float, iterations: int = 20000) -> np.ndarray:
    """Independent proximal-gradient solver on centred data."""
    xc = features - features.mean(axis=0)
    yc = y - y.mean()
    n = len(y)
    step = n / (2.0 * np.linalg.norm(xc, 2) ** 2)
    beta = np.zeros(features.shape[1])
    momentum = beta.copy()
    t = 1.0
    for _ in range(iterations):
        grad = -2.0 / n * xc.T @ (yc - xc @ momentum)
        nxt = soft_threshold(momentum - step * grad, step * eta)
        t_next = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        momentum = nxt + (t - 1.0) / t_next * (nxt - beta)
        beta, t = nxt, t_next
    return beta


class TestSoftThreshold:
    """Tests for soft_threshold."""

    def test_values(self):
        """Test shrinkage towards zero."""
        np.testing.assert_allclose(
            soft_threshold(np.array([-3.0, -0.5, 0.0, 0.5, 3.0]), 1.0), [-2.0, 0.0, 0.0, 0.0, 2.0]
        )


class TestGramStats:
    """Tests for GramStats."""

    def test_centered_matches_numpy(self):
        """Test centred moments against numpy on the same rows."""
        features, y = _problem(50, 4)
        stats = GramStats(4)
        for row, target in zip(features, y):
            stats.add(row, float(target))
        cov, cross, vyy = stats.centered()
        np.testing.assert_allclose(cov, np.cov(features, rowvar=False, bias=True), atol=1e-12)
        expected = ((features - features.mean(0)) * (y - y.mean())[:, None]).mean(0)
        np.testing.assert_allclose(cross, expected, atol=1e-12)
        assert vyy == pytest.approx(y.var())

    def test_remove_undoes_add(self):
        """Test evicting a row restores the previous sums."""
        features, y = _problem(10, 3)
        full = GramStats.from_arrays(features, y)
        full.remove(features[0], float(y[0]))
        rest = GramStats.from_arrays(features[1:], y[1:])
        np.testing.assert_allclose(full.sxx, rest.sxx, atol=1e-12)
        assert full.n == rest.n
        assert full.n_seen == 10

    def test_wrong_width(self):
        """Test adding a row of the wrong width."""
        with pytest.raises(DimensionMismatchError):
            GramStats(3).add(np.zeros(2), 0.0)

    def test_dict_round_trip_exact(self):
        """Test serialised sums come back bit for bit."""
        features, y = _problem(30, 3)
        stats = GramStats.from_arrays(features, y)
        again = GramStats.from_dict(stats.to_dict())
        np.testing.assert_array_equal(again.sxx, stats.sxx)
        assert again.syy == stats.syy


class TestFitPath:
    """Tests for coordinate descent."""

    @pytest.mark.parametrize("eta", [0.01, 0.1, 0.5])
    def test_matches_proximal_gradient(self, eta):
        """Test the converged solution matches an independent FISTA solve."""
        features, y = _problem()
        cov, cross, vyy = GramStats.from_arrays(features, y).centered()
        betas = np.zeros((1, features.shape[1]))
        fit_path(cov, cross, np.array([eta]), betas, 2000, tol=1e-14, vyy=vyy)
        np.testing.assert_allclose(betas[0], _fista(features, y, eta), atol=1e-5)

    def test_kkt_conditions(self):
        """Test the subgradient optimality conditions at convergence."""
        features, y = _problem()
        eta = 0.2
        cov, cross, _ = GramStats.from_arrays(features, y).centered()
        betas = np.zeros((1, features.shape[1]))
        fit_path(cov, cross, np.array([eta]), betas, 5000, tol=1e-15)
        beta = betas[0]
        gradient = 2.0 * (cov @ beta - cross)
        active = beta != 0.0
        np.testing.assert_allclose(gradient[active], -eta * np.sign(beta[active]), atol=1e-6)
        assert np.all(np.abs(gradient[~active]) <= eta + 1e-6)

    def test_sweeps_never_increase_objective(self):
        """Test each cyclic pass is a descent step."""
        features, y = _problem()
        state = LassoState.from_arrays(features, y, eta=0.05)
        previous = state.objective()
        for _ in range(10):
            cd_sweep(state, 1)
            current = state.objective()
            assert current <= previous + 1e-12
            previous = current

    def test_large_eta_gives_zero(self):
        """Test eta above 2 * max|c| zeroes every coefficient."""
        features, y = _problem()
        cov, cross, _ = GramStats.from_arrays(features, y).centered()
        eta = 2.0 * np.max(np.abs(cross)) + 1e-9
        betas = np.zeros((1, features.shape[1]))
        fit_path(cov, cross, np.array([eta]), betas, 50)
        np.testing.assert_array_equal(betas[0], 0.0)

    def test_path_rungs_independent(self):
        """Test fitting several etas at once equals fitting each alone."""
        features, y = _problem()
        cov, cross, _ = GramStats.from_arrays(features, y).centered()
        etas = np.array([0.01, 0.3])
        together = np.zeros((2, features.shape[1]))
        fit_path(cov, cross, etas, together, 40)
        for i, eta in enumerate(etas):
            alone = np.zeros((1, features.shape[1]))
            fit_path(cov, cross, np.array([eta]), alone, 40)
            np.testing.assert_allclose(together[i], alone[0], atol=1e-12)

    def test_unpenalised_fit_solves_normal_equations(self):
        """Test eta = 0 reproduces least squares with an intercept."""
        features = np.array(
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0]]
        )
        y = np.array([1.0, 2.0, 0.5, 2.5, 3.0])
        state = cd_sweep(LassoState.from_arrays(features, y, eta=0.0), 2000)
        design = np.column_stack([np.ones(5), features])
        solution, *_ = np.linalg.lstsq(design, y, rcond=None)
        beta, intercept = state.coefficients()
        np.testing.assert_allclose(beta, solution[1:], atol=1e-6)
        assert intercept == pytest.approx(solution[0], abs=1e-6)

    @pytest.mark.parametrize("seed", range(50))
    def test_random_problems_reach_optimum(self, seed):
        """Test objective and optimality conditions on small random problems."""
        rng = np.random.default_rng(seed)
        features = rng.normal(size=(20, 10))
        y = features @ rng.normal(size=10) + rng.normal(size=20)
        eta = 0.1
        cov, cross, vyy = GramStats.from_arrays(features, y).centered()
        betas = np.zeros((1, 10))
        fit_path(cov, cross, np.array([eta]), betas, 5000, tol=1e-15, vyy=vyy)
        reference = _fista(features, y, eta)
        objectives = path_objective(cov, cross, vyy, np.vstack([betas[0], reference]), eta)
        assert abs(objectives[0] - objectives[1]) <= 1e-6
        beta = betas[0]
        gradient = 2.0 * (cov @ beta - cross)
        active = beta != 0.0
        np.testing.assert_allclose(gradient[active], -eta * np.sign(beta[active]), atol=1e-6)
        assert np.all(np.abs(gradient[~active]) <= eta + 1e-6)

    def test_constant_column_stays_zero(self):
        """Test a zero-variance feature gets a zero coefficient."""
        features, y = _problem()
        features[:, 4] = 3.0
        cov, cross, _ = GramStats.from_arrays(features, y).centered()
        betas = np.ones((1, features.shape[1]))
        fit_path(cov, cross, np.array([0.01]), betas, 20)
        assert betas[0, 4] == 0.0


class TestLassoState:
    """Tests for LassoState."""

    def test_intercept_profiles_means(self):
        """Test the objective on data equals the sufficient-statistics objective."""
        features, y = _problem()
        state = cd_sweep(LassoState.from_arrays(features, y, eta=0.1), 200)
        beta, intercept = state.coefficients()
        assert lasso_objective(features, y, beta, intercept, 0.1) == pytest.approx(
            state.objective(), rel=1e-9
        )

    def test_bounded_window(self):
        """Test a bounded window keeps only the most recent rows."""
        features, y = _problem(20, 3)
        state = LassoState.empty(3, 0.1)
        for row, target in zip(features, y):
            state.absorb(row, float(target), max_window=5)
        assert state.stats.n == 5
        assert state.n_seen == 20
        recent = GramStats.from_arrays(features[-5:], y[-5:])
        np.testing.assert_allclose(state.stats.sxy, recent.sxy, atol=1e-10)

    def test_unbounded_window_keeps_no_rows(self):
        """Test without a window limit only the sums are stored."""
        features, y = _problem(50, 3)
        state = LassoState.from_arrays(features, y, eta=0.1)
        assert state.stats.n == 50
        assert len(state.window) == 0

    def test_online_path_tracks_batch_fit(self):
        """Test absorbing rows one at a time with a few sweeps stays near a full refit."""
        features, y = _problem(300, 6, seed=3)
        state = LassoState.empty(6, 0.05)
        for row, target in zip(features, y):
            state.absorb(row, float(target))
            cd_sweep(state, 3)
        batch = cd_sweep(LassoState.from_arrays(features, y, eta=0.05), 2000)
        assert state.objective() - batch.objective() <= 1e-4

    def test_empty_state_unchanged_by_sweep(self):
        """Test sweeping an empty window is a no-op."""
        state = LassoState.empty(3, 0.1)
        cd_sweep(state, 5)
        np.testing.assert_array_equal(state.beta, 0.0)


class TestEtaGrid:
    """Tests for eta_grid."""

    def test_ascending_and_scaled(self):
        """Test the grid ascends over [1e-3, 1e1] * max|c|."""
        features, y = _problem()
        stats = GramStats.from_arrays(features, y)
        etas = eta_grid(stats, 20)
        scale = np.max(np.abs(stats.centered()[1]))
        assert np.all(np.diff(etas) > 0)
        assert etas[0] == pytest.approx(1e-3 * scale)
        assert etas[-1] == pytest.approx(1e1 * scale)

    def test_zero_scale_falls_back(self):
        """Test a zero response uses scale 1."""
        features, _ = _problem()
        etas = eta_grid(GramStats.from_arrays(features, np.zeros(len(features))), 3)
        np.testing.assert_allclose(etas, [1e-3, 1e-1, 1e1])
