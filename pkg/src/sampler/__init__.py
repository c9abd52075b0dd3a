"""Conditional dummy-feature samplers for X given Z."""

from .base import DummySampler, assert_response_blind, sample_dummy, sample_dummy_batches
from .gaussian import (
    FittedGaussianSampler,
    GaussianLinearSampler,
    JointGaussian,
    fit_gaussian_sampler,
)
from .io import load_sampler, sampler_from_document, sampler_to_document, save_sampler
from .logistic import BernoulliLogisticSampler, fit_logistic_sampler

__all__ = [
    "BernoulliLogisticSampler",
    "DummySampler",
    "FittedGaussianSampler",
    "GaussianLinearSampler",
    "JointGaussian",
    "assert_response_blind",
    "fit_gaussian_sampler",
    "fit_logistic_sampler",
    "load_sampler",
    "sample_dummy",
    "sample_dummy_batches",
    "sampler_from_document",
    "sampler_to_document",
    "save_sampler",
]
