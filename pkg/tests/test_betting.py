"""
Unit tests for betting scores and batch statistics.
"""

import numpy as np
import pytest
from scipy import stats

from src.betting import BettingScore, ScoreFn, batch_mse, derandomized_score, score
from src.core.config import ScoreKind, TestConfig
from src.core.errors import DomainError, EmptyBatchError
from src.core.rng import RngStream
from src.core.types import Observation, observations_from_arrays
from src.model.ladder import ModelSnapshot
from src.sampler.base import sample_dummy_batches
from src.sampler.gaussian import GaussianLinearSampler

PAIRS = [(1.0, 2.0), (2.0, 1.0), (0.5, 0.5), (0.0, 1e-9), (3.0, 300.0), (1e-15, 0.0)]


class TestScoreFn:
    """Tests for the score families."""

    @pytest.mark.parametrize("kind", list(ScoreKind))
    @pytest.mark.parametrize("q,q_tilde", PAIRS)
    def test_antisymmetric(self, kind, q, q_tilde):
        """Test g(a, b) = -g(b, a) exactly."""
        fn = ScoreFn(kind, 0.7)
        assert float(fn(q, q_tilde)) == -float(fn(q_tilde, q))

    @pytest.mark.parametrize("kind", list(ScoreKind))
    def test_bounded_and_monotone(self, kind):
        """Test |g| <= m and g is non-decreasing in the dummy statistic."""
        fn = ScoreFn(kind, 0.5)
        values = fn(1.0, np.linspace(0.0, 5.0, 201))
        assert np.all(np.abs(values) <= 0.5)
        assert np.all(np.diff(values) >= 0.0)

    def test_sign_values(self):
        """Test the sign score."""
        fn = ScoreFn(ScoreKind.SIGN)
        assert fn(1.0, 2.0) == 1.0
        assert fn(2.0, 1.0) == -1.0
        assert fn(1.0, 1.0) == 0.0

    def test_tanh_saturates(self):
        """Test the smooth score approaches m for a large relative gap."""
        fn = ScoreFn(ScoreKind.TANH, 1.0)
        assert float(fn(1.0, 2.0)) == pytest.approx(np.tanh(10.0))
        assert float(fn(0.0, 0.0)) == 0.0

    def test_magnitude_range(self):
        """Test m outside (0, 1] is refused."""
        with pytest.raises(DomainError):
            ScoreFn(magnitude=1.5)
        with pytest.raises(DomainError):
            ScoreFn(magnitude=0.0)

    def test_from_config(self):
        """Test the config picks kind and magnitude."""
        fn = ScoreFn.from_config(TestConfig(score_kind="tanh", score_magnitude=0.3))
        assert fn.kind == ScoreKind.TANH and fn.magnitude == 0.3

    def test_score_record(self):
        """Test score() keeps the statistics behind the bet."""
        bet = score(ScoreFn(), 1.0, 3.0)
        assert (bet.w, bet.q, bet.q_tilde) == (1.0, 1.0, 3.0)

    def test_betting_score_bound(self):
        """Test |W| > 1 is refused."""
        with pytest.raises(DomainError):
            BettingScore(1.5)


class TestStatistics:
    """Tests for batch_mse and derandomized_score."""

    def _batch(self, n: int = 10, seed: int = 0, signal: float = 0.0):
        rng = np.random.default_rng(seed)
        z = rng.normal(size=(n, 2))
        x = z[:, 0] + rng.normal(size=n)
        y = signal * x + z[:, 1] + 0.1 * rng.normal(size=n)
        return [Observation(float(a), float(b), tuple(c)) for a, b, c in zip(x, y, z)]

    def test_batch_mse(self):
        """Test the mean squared error of a fixed model."""
        model = ModelSnapshot(np.array([1.0, 0.0]), 0.0, 0)
        batch = [Observation(1.0, 3.0, (0.0,)), Observation(2.0, 2.0, (5.0,))]
        assert batch_mse(model, batch) == pytest.approx(2.0)

    def test_empty_batch(self):
        """Test empty batches raise EmptyBatchError."""
        model = ModelSnapshot(np.zeros(2), 0.0, 0)
        with pytest.raises(EmptyBatchError):
            batch_mse(model, [])
        with pytest.raises(EmptyBatchError):
            derandomized_score(model, [], GaussianLinearSampler([1.0]), 3, ScoreFn(), RngStream(0))

    def test_deterministic_given_stream(self):
        """Test identical streams give identical scores."""
        batch = self._batch()
        model = ModelSnapshot(np.array([0.5, 0.0, 1.0]), 0.0, 0)
        sampler = GaussianLinearSampler([1.0, 0.0])
        a = derandomized_score(model, batch, sampler, 20, ScoreFn(), RngStream(5))
        b = derandomized_score(model, batch, sampler, 20, ScoreFn(), RngStream(5))
        assert a == b
        assert -1.0 <= a.w <= 1.0

    def test_positive_under_signal(self):
        """Test a model using x bets positively when x truly matters."""
        batch = self._batch(n=50, signal=3.0)
        model = ModelSnapshot(np.array([3.0, 0.0, 1.0]), 0.0, 0)
        sampler = GaussianLinearSampler([1.0, 0.0])
        bet = derandomized_score(model, batch, sampler, 20, ScoreFn(), RngStream(1))
        assert bet.w == 1.0
        assert bet.q_tilde > bet.q

    def test_model_ignoring_x_scores_zero(self):
        """Test a zero x coefficient makes every dummy tie."""
        batch = self._batch()
        model = ModelSnapshot(np.array([0.0, 0.0, 1.0]), 0.0, 0)
        bet = derandomized_score(
            model, batch, GaussianLinearSampler([1.0, 0.0]), 10, ScoreFn(), RngStream(2)
        )
        assert bet.w == 0.0

    def test_k_one_matches_single_draw(self):
        """Test K = 1 scores the single dummy copy."""
        batch = self._batch()
        model = ModelSnapshot(np.array([0.5, 0.0, 1.0]), 0.0, 0)
        sampler = GaussianLinearSampler([1.0, 0.0])
        bet = derandomized_score(model, batch, sampler, 1, ScoreFn(), RngStream(3))
        assert bet.w in (-1.0, 0.0, 1.0)


def _null_rows(n: int, seed: int):
    """x depends on z only; y depends on z only."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, 2))
    x = z[:, 0] + rng.normal(size=n)
    y = z[:, 1] + 0.5 * z[:, 0] ** 2 + rng.normal(size=n)
    return x, y, z


def _null_scores(count: int, k: int, kind: ScoreKind, size: int = 5) -> np.ndarray:
    """Betting scores of a frozen model on `count` independent null batches."""
    x, y, z = _null_rows(count * size, seed=17)
    observations = observations_from_arrays(x, y, z)
    # the x coefficient must be non-zero, otherwise every dummy ties
    model = ModelSnapshot(np.array([0.7, 0.2, 1.0]), 0.1, 0)
    sampler = GaussianLinearSampler([1.0, 0.0])
    fn = ScoreFn(kind)
    root = RngStream(23)
    return np.array(
        [
            derandomized_score(
                model, observations[i * size : (i + 1) * size], sampler, k, fn, root.child(i)
            ).w
            for i in range(count)
        ]
    )


class TestNullBehaviour:
    """Scores under the null with the exact sampler and a frozen model."""

    @pytest.mark.parametrize("kind", list(ScoreKind))
    @pytest.mark.parametrize("k", [1, 20])
    def test_mean_zero_and_symmetric(self, kind, k):
        """Test mean W is within 3 SE of 0 and positive and negative bets balance."""
        scores = _null_scores(10_000, k, kind)
        assert abs(scores.mean()) <= 3.0 * scores.std(ddof=1) / np.sqrt(scores.size)
        positive = int(np.sum(scores > 0.0))
        negative = int(np.sum(scores < 0.0))
        assert stats.binomtest(positive, positive + negative, 0.5).pvalue > 0.01

    @pytest.mark.parametrize("kind", list(ScoreKind))
    def test_variance_shrinks_with_k(self, kind):
        """Test averaging more dummy copies does not increase the variance of W."""
        single = _null_scores(2000, 1, kind)
        averaged = _null_scores(2000, 20, kind)
        assert averaged.var() <= single.var()

    def test_dummy_exchangeable_with_x(self):
        """Test swapping x and its dummy leaves the mean of a fixed function unchanged."""
        x, y, z = _null_rows(10_000, seed=29)
        x_tilde = sample_dummy_batches(GaussianLinearSampler([1.0, 0.0]), z, 1, RngStream(31))[0]

        def phi(a, b):
            return (y - a) ** 2 + a * b * z[:, 0] + np.maximum(a - b, 0.0) * z[:, 1]

        diff = phi(x, x_tilde) - phi(x_tilde, x)
        assert abs(diff.mean()) <= 3.0 * diff.std(ddof=1) / np.sqrt(diff.size)
