"""
Shared fixtures for the test suite.
"""

import pytest

from src.core.config import ModelConfig, TestConfig
from src.core.rng import RngStream
from src.datagen.synthetic import Regime, SyntheticConfig, gen_dataset
from src.sampler.gaussian import GaussianLinearSampler


@pytest.fixture
def rng():
    """A fresh root stream."""
    return RngStream(1234)


@pytest.fixture
def small_config():
    """A cheap test configuration."""
    return TestConfig(n_init=20, batch_sizes=(2, 5), k_derandomize=5, grid_size=50, seed=7)


@pytest.fixture
def small_model_config():
    """A short eta ladder."""
    return ModelConfig(n_rungs=5)


@pytest.fixture
def null_dataset():
    """400 null observations with d = 5."""
    return gen_dataset(SyntheticConfig(regime=Regime.NULL, n=400, d=5, seed=11))


@pytest.fixture
def signal_dataset():
    """400 non-null observations with d = 5 and a strong effect."""
    return gen_dataset(SyntheticConfig(regime=Regime.NON_NULL, n=400, d=5, signal_amp=3.0, seed=12))


@pytest.fixture
def linear_sampler():
    """X | Z ~ N(z_0, 1) with d = 3."""
    return GaussianLinearSampler([1.0, 0.0, 0.0], 1.0)
