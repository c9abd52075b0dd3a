"""Synthetic data generators."""

from .synthetic import (
    Regime,
    SyntheticConfig,
    SyntheticDataset,
    ar1_covariance,
    dump_dataset,
    gen_autocorrelated,
    gen_dataset,
    misspecified_sampler,
)

__all__ = [
    "Regime",
    "SyntheticConfig",
    "SyntheticDataset",
    "ar1_covariance",
    "dump_dataset",
    "gen_autocorrelated",
    "gen_dataset",
    "misspecified_sampler",
]
