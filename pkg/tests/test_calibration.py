"""
Monte-Carlo calibration checks. Slow; deselect with -m "not slow".
"""

import numpy as np
import pytest

from src.core.config import ModelConfig, TestConfig
from src.core.rng import RngStream
from src.datagen.synthetic import Regime, SyntheticConfig, gen_dataset
from src.harness.experiment import ExperimentSpec, run_experiment
from src.martingale.mixture import MixtureState, mixture_update
from src.martingale.tester import run_sequential
from src.offline import LeastSquaresTrainer, crt_pvalue

pytestmark = pytest.mark.slow


FAST_TEST = {"n_init": 20, "batch_sizes": [2, 5, 10], "k_derandomize": 5, "grid_size": 100}


def _binomial_se(rate: float, trials: int) -> float:
    return float(np.sqrt(rate * (1.0 - rate) / trials))


def _spec(scenario: str, trials: int, **overrides) -> ExperimentSpec:
    document = {
        "scenario": scenario,
        "trials": trials,
        "horizon": 300,
        "checkpoints": [100, 300],
        "test": FAST_TEST,
        "data": {"d": 5},
        "model": {"n_rungs": 8},
        "seed": 2024,
    }
    document.update(overrides)
    return ExperimentSpec.model_validate(document)


class TestCalibration:
    """Type-I error and power over repeated trials."""

    def test_type1_error_controlled(self):
        """Test the null rejection rate stays near alpha at every checkpoint."""
        table = run_experiment(_spec("type1", 200))
        # alpha + 3 binomial standard errors
        bound = 0.05 + 3 * _binomial_se(0.05, 200)
        assert all(row.rejection_rate <= bound for row in table.rows)

    def test_power_grows_with_time(self):
        """Test non-null rejection rates are high and non-decreasing."""
        table = run_experiment(_spec("power", 50))
        rates = [row.rejection_rate for row in table.rows]
        assert rates == sorted(rates)
        assert rates[-1] >= 0.9

    def test_offline_crt_super_uniform(self):
        """Test offline p-values are not too small under the null."""
        hits = 0
        trials = 200
        for i in range(trials):
            data = gen_dataset(SyntheticConfig(regime=Regime.NULL, n=60, d=3), RngStream(7, i))
            p = crt_pvalue(
                data.observations, LeastSquaresTrainer(), data.sampler, 19, RngStream(8, i)
            ).p_value
            hits += p <= 0.1
        assert hits / trials <= 0.1 + 3 * np.sqrt(0.1 * 0.9 / trials)

    def test_rejecting_trials_stop_early(self):
        """Test the median stop time of rejecting non-null trials is at most 800."""
        spec = _spec("power", 50, horizon=1000, checkpoints=[1000])
        row = run_experiment(spec).row("-", 1000)
        assert row.rejection_rate >= 0.9
        assert row.stop_q50 is not None and row.stop_q50 <= 800


class TestMartingaleValidity:
    """Ville's inequality and the supermartingale property in simulation."""

    def test_fair_bets_rarely_cross(self):
        """Test fair +-1 scores cross 20 within 5000 bets in at most alpha + 2 SE of runs."""
        runs = 1000
        rng = np.random.default_rng(99)
        crossed = 0
        for _ in range(runs):
            state = MixtureState.fresh(100)
            for w in np.where(rng.uniform(size=5000) < 0.5, 1.0, -1.0):
                mixture_update(state, float(w))
                if state.wealth >= 20.0:
                    crossed += 1
                    break
        assert crossed / runs <= 0.05 + 2 * _binomial_se(0.05, runs)

    def test_null_mean_wealth_bounded(self):
        """Test mean ensemble wealth under the null stays below 1 + 3 SE."""
        trials = 100
        checkpoints = (100, 500, 1000)
        config = TestConfig(**FAST_TEST)
        wealth = np.zeros((trials, len(checkpoints)))
        for i in range(trials):
            data = gen_dataset(
                SyntheticConfig(regime=Regime.NULL, n=1020, d=5), RngStream(31, stream_id=i)
            )
            outcome = run_sequential(
                data.observations,
                config,
                data.sampler,
                RngStream(32, stream_id=i),
                ModelConfig(n_rungs=8),
            )
            # a stopped test holds its wealth
            wealth[i] = [outcome.wealth_at(t) for t in checkpoints]
        mean = wealth.mean(axis=0)
        se = wealth.std(axis=0, ddof=1) / np.sqrt(trials)
        assert np.all(mean <= 1.0 + 3.0 * se + 1e-12)


class TestAblations:
    """Harness scenarios compared on paired seeds."""

    def test_derandomization_does_not_hurt(self):
        """Test power with K = 20 is at least power with K = 1 minus 0.03."""
        spec = _spec("ablate_k", 100, checkpoints=[50, 100, 200, 300], values=[1, 20])
        table = run_experiment(spec)
        single = table.series("1", "rejection_rate")
        averaged = table.series("20", "rejection_rate")
        assert len(single) == len(averaged) == 4
        assert all(k20 >= k1 - 0.03 for k1, k20 in zip(single, averaged))

    def test_peeking_baseline_inflates_type1(self):
        """Test repeated offline looks reject the null well above alpha."""
        trials = 200
        spec = _spec("peeking_hazard", trials, checkpoints=[300], peek_every=20, offline_m=100)
        row = run_experiment(spec).row("-", 300)
        bound = 0.05 + 3 * _binomial_se(0.05, trials)
        assert row.baseline_rejection_rate is not None
        assert row.baseline_rejection_rate > bound
        assert row.rejection_rate <= bound


class TestMisspecifiedSampler:
    """Type-I error when the sampler's conditional std is wrong."""

    TRIALS = 200
    # near-least-squares model, so the x coefficient is not shrunk to zero
    MODEL = {"n_rungs": 1, "eta_min_factor": 1e-4}

    def _rates(self, sigma_tilde: float, n_init: int) -> list[float]:
        spec = _spec(
            "misspec_sweep",
            self.TRIALS,
            checkpoints=[100, 300],
            values=[sigma_tilde],
            test={**FAST_TEST, "n_init": n_init, "k_derandomize": 20},
            model=self.MODEL,
        )
        return run_experiment(spec).series(str(sigma_tilde), "rejection_rate")

    def test_narrow_sampler_is_conservative(self):
        """Test sigma_tilde = 0.1 keeps type-I error within alpha + 2 SE."""
        bound = 0.05 + 2 * _binomial_se(0.05, self.TRIALS)
        assert all(rate <= bound for rate in self._rates(0.1, 20))

    def test_wide_sampler_inflates_and_warmup_helps(self):
        """Test sigma_tilde = 3 inflates type-I error, less so after a longer warm-up."""
        short = self._rates(3.0, 20)
        long = self._rates(3.0, 200)
        assert short[-1] >= 0.05 + 3 * _binomial_se(0.05, self.TRIALS)
        assert long[-1] < short[-1]
