"""
Synthetic designs with known ground truth.

Independent design:
    Z ~ N(0, I_d),  X | Z ~ N(u.Z, 1),  Y = (w.Z)^2 + amp * X * [non-null] + N(0, 1)

Autocorrelated design (rho > 0): (X, Z) ~ N(0, Sigma) over d + 1 coordinates
with Sigma_ij = rho^|i - j| and X the first coordinate; Y as above.

u and w are drawn per dataset unless coef_seed pins them.
"""

from enum import Enum
from pathlib import Path
from typing import NamedTuple, Optional, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import DomainError
from ..core.rng import RngStream
from ..core.stream import write_records
from ..core.types import Observation, observations_from_arrays
from ..sampler.gaussian import FittedGaussianSampler, GaussianLinearSampler, JointGaussian

logger = structlog.get_logger(__name__)

TrueSampler = Union[GaussianLinearSampler, FittedGaussianSampler]


class Regime(str, Enum):
    """Whether X carries signal about Y."""

    NULL = "null"
    NON_NULL = "non_null"


class SyntheticConfig(BaseModel):
    """Parameters of one synthetic dataset."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    regime: Regime = Field(default=Regime.NULL, description="Null or non-null response")
    n: int = Field(default=1000, ge=1, description="Number of observations")
    d: int = Field(default=19, ge=1, description="Number of covariates")
    signal_amp: float = Field(default=3.0, description="Coefficient of X in the non-null response")
    rho: float = Field(default=0.0, ge=0.0, lt=1.0, description="AR(1) correlation of (X, Z)")
    sigma_tilde: float = Field(default=1.0, gt=0.0, description="Sampler std handed to the test")
    seed: int = Field(default=0, ge=0, description="Seed used when no stream is supplied")
    coef_seed: Optional[int] = Field(default=None, ge=0, description="Pin u and w across datasets")


class SyntheticDataset(NamedTuple):
    observations: list[Observation]
    sampler: TrueSampler
    regime: Regime


def ar1_covariance(dim: int, rho: float) -> np.ndarray:
    """Sigma_ij = rho^|i - j|."""
    if not 0.0 <= rho < 1.0:
        raise DomainError(f"rho must lie in [0, 1), got {rho}")
    lags = np.abs(np.subtract.outer(np.arange(dim), np.arange(dim)))
    return np.power(float(rho), lags)


def _streams(cfg: SyntheticConfig, rng: Optional[RngStream]) -> tuple[RngStream, RngStream]:
    root = rng if rng is not None else RngStream(cfg.seed)
    coef_rng = RngStream(cfg.coef_seed) if cfg.coef_seed is not None else root.child(0)
    return coef_rng, root.child(1)


def _response(
    cfg: SyntheticConfig, x: np.ndarray, z: np.ndarray, w: np.ndarray, noise: np.ndarray
) -> np.ndarray:
    y = (z @ w) ** 2 + noise
    if cfg.regime == Regime.NON_NULL:
        y = y + cfg.signal_amp * x
    return y


def gen_dataset(cfg: SyntheticConfig, rng: Optional[RngStream] = None) -> SyntheticDataset:
    """
    Generate a dataset and the true conditional sampler of X given Z.

    Dispatches to gen_autocorrelated when rho > 0.
    """
    if cfg.rho > 0.0:
        return gen_autocorrelated(cfg, rng)

    coef_rng, data_rng = _streams(cfg, rng)
    u = coef_rng.normal(size=cfg.d)
    w = coef_rng.normal(size=cfg.d)

    z = data_rng.normal(size=(cfg.n, cfg.d))
    x = z @ u + data_rng.normal(size=cfg.n)
    y = _response(cfg, x, z, w, data_rng.normal(size=cfg.n))

    logger.debug("dataset_generated", regime=cfg.regime.value, n=cfg.n, d=cfg.d)
    return SyntheticDataset(observations_from_arrays(x, y, z), GaussianLinearSampler(u), cfg.regime)


def gen_autocorrelated(cfg: SyntheticConfig, rng: Optional[RngStream] = None) -> SyntheticDataset:
    """
    Generate (X, Z) from the AR(1) Gaussian; the returned sampler is the exact
    conditional of the first coordinate given the rest.
    """
    coef_rng, data_rng = _streams(cfg, rng)
    w = coef_rng.normal(size=cfg.d)

    sigma = ar1_covariance(cfg.d + 1, cfg.rho)
    chol = np.linalg.cholesky(sigma)
    joint = data_rng.normal(size=(cfg.n, cfg.d + 1)) @ chol.T
    x, z = joint[:, 0], joint[:, 1:]
    y = _response(cfg, x, z, w, data_rng.normal(size=cfg.n))

    sampler = JointGaussian(np.zeros(cfg.d + 1), sigma).conditional(0, ridge_factor=0.0)
    logger.debug("dataset_generated", regime=cfg.regime.value, n=cfg.n, d=cfg.d, rho=cfg.rho)
    return SyntheticDataset(observations_from_arrays(x, y, z), sampler, cfg.regime)


def misspecified_sampler(true_sampler: TrueSampler, sigma_tilde: float) -> TrueSampler:
    """
    Same conditional mean, conditional std replaced by sigma_tilde.

    Raises:
        DomainError: If sigma_tilde <= 0.
    """
    if not sigma_tilde > 0:
        raise DomainError(f"sigma_tilde must be positive, got {sigma_tilde}")
    if isinstance(true_sampler, GaussianLinearSampler):
        return true_sampler.with_sigma(sigma_tilde)
    return true_sampler.with_std(sigma_tilde)


def dump_dataset(path: Union[str, Path], observations: list[Observation]) -> int:
    """Write observations in the NDJSON record format."""
    count = write_records(path, observations)
    logger.info("dataset_dumped", path=str(path), rows=count)
    return count
