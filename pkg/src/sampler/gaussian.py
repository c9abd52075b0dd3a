"""
Gaussian conditional samplers.

GaussianLinearSampler is the exact law of the synthetic designs,
X | Z ~ N(u.z, sigma^2). FittedGaussianSampler is the conditional of one column
of a fitted joint Gaussian given the remaining columns.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
import structlog
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..core.errors import DimensionMismatchError, DomainError, SingularCovarianceError
from ..core.rng import RngStream

logger = structlog.get_logger(__name__)

RIDGE_FACTOR = 1e-6
STD_FLOOR = 1e-8


def _frozen(values: Any) -> np.ndarray:
    array = np.array(values, dtype=float).ravel()
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class GaussianLinearSampler:
    """X | Z ~ N(u.z, sigma^2)."""

    u: np.ndarray
    sigma: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", _frozen(self.u))
        if not np.all(np.isfinite(self.u)):
            raise DomainError("u must be finite")
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        object.__setattr__(self, "sigma", float(self.sigma))

    @property
    def dim(self) -> int:
        return int(self.u.shape[0])

    def mean(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z, dtype=float) @ self.u

    def draw(self, z: np.ndarray, rng: RngStream, copies: int = 1) -> np.ndarray:
        if z.shape[1] != self.dim:
            raise DimensionMismatchError(self.dim, z.shape[1])
        noise = rng.normal(0.0, self.sigma, size=(copies, z.shape[0]))
        return self.mean(z)[None, :] + noise

    def with_sigma(self, sigma: float) -> "GaussianLinearSampler":
        return GaussianLinearSampler(self.u, sigma)

    def to_dict(self) -> dict[str, Any]:
        return {"u": self.u.tolist(), "sigma": self.sigma}

    @classmethod
    def from_dict(cls, params: dict[str, Any]) -> "GaussianLinearSampler":
        return cls(params["u"], params["sigma"])


@dataclass(frozen=True, eq=False)
class FittedGaussianSampler:
    """X | Z ~ N(offset + coef.z, std^2) derived from a joint-Gaussian fit."""

    cond_coef: np.ndarray
    cond_mean_offset: float
    cond_std: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "cond_coef", _frozen(self.cond_coef))
        if not self.cond_std > 0:
            raise DomainError(f"cond_std must be positive, got {self.cond_std}")
        object.__setattr__(self, "cond_mean_offset", float(self.cond_mean_offset))
        object.__setattr__(self, "cond_std", float(self.cond_std))

    @property
    def dim(self) -> int:
        return int(self.cond_coef.shape[0])

    def mean(self, z: np.ndarray) -> np.ndarray:
        return self.cond_mean_offset + np.asarray(z, dtype=float) @ self.cond_coef

    def draw(self, z: np.ndarray, rng: RngStream, copies: int = 1) -> np.ndarray:
        if z.shape[1] != self.dim:
            raise DimensionMismatchError(self.dim, z.shape[1])
        noise = rng.normal(0.0, self.cond_std, size=(copies, z.shape[0]))
        return self.mean(z)[None, :] + noise

    def with_std(self, std: float) -> "FittedGaussianSampler":
        return FittedGaussianSampler(self.cond_coef, self.cond_mean_offset, std)

    def to_dict(self) -> dict[str, Any]:
        return {
            "cond_coef": self.cond_coef.tolist(),
            "cond_mean_offset": self.cond_mean_offset,
            "cond_std": self.cond_std,
        }

    @classmethod
    def from_dict(cls, params: dict[str, Any]) -> "FittedGaussianSampler":
        return cls(params["cond_coef"], params["cond_mean_offset"], params["cond_std"])


@dataclass(frozen=True, eq=False)
class JointGaussian:
    """A multivariate Gaussian over all columns, conditioned per column on demand."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = _frozen(self.mean)
        cov = np.array(self.cov, dtype=float)
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatchError(mean.size, cov.shape[0], what="covariance")
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def fit(cls, rows: np.ndarray) -> "JointGaussian":
        """
        Sample mean and unbiased covariance of an n x p matrix.

        Raises:
            DomainError: If n < p + 1, too few rows to estimate the covariance.
        """
        data = np.asarray(rows, dtype=float)
        if data.ndim != 2:
            raise DomainError(f"expected a 2-D matrix, got shape {data.shape}")
        n, p = data.shape
        if n < p + 1:
            raise DomainError(f"need at least {p + 1} rows to fit {p} columns, got {n}")
        return cls(data.mean(axis=0), np.cov(data, rowvar=False).reshape(p, p))

    def conditional(self, j: int, ridge_factor: float = RIDGE_FACTOR) -> FittedGaussianSampler:
        """
        Analytic conditional of column j given all other columns.

        The covariate block is regularised with a ridge of ridge_factor * trace / d;
        pass 0 for a known, well-conditioned covariance.

        Raises:
            SingularCovarianceError: If the regularised block is not positive definite.
        """
        p = self.mean.size
        others = [i for i in range(p) if i != j]
        if not others:
            std = max(float(np.sqrt(self.cov[j, j])), STD_FLOOR)
            return FittedGaussianSampler(np.empty(0), self.mean[j], std)

        s_zz = self.cov[np.ix_(others, others)]
        s_zx = self.cov[others, j]
        d = len(others)
        ridge = ridge_factor * np.trace(s_zz) / d
        try:
            factor = cho_factor(s_zz + ridge * np.eye(d))
        except LinAlgError as e:
            raise SingularCovarianceError(f"covariate covariance is singular: {e}") from e

        coef = cho_solve(factor, s_zx)
        variance = self.cov[j, j] - float(s_zx @ coef)
        offset = self.mean[j] - float(coef @ self.mean[others])
        std = max(float(np.sqrt(max(variance, 0.0))), STD_FLOOR)
        return FittedGaussianSampler(coef, offset, std)


def fit_gaussian_sampler(unlabeled: np.ndarray) -> FittedGaussianSampler:
    """
    Fit X | Z from an n x (d + 1) matrix of (x, z) rows.

    Raises:
        DomainError: If n < d + 2.
        SingularCovarianceError: If the covariate covariance cannot be factorised.
    """
    data = np.asarray(unlabeled, dtype=float)
    if data.ndim != 2 or data.shape[1] < 2:
        raise DomainError(f"expected an n x (d + 1) matrix with d >= 1, got shape {data.shape}")
    n, p = data.shape
    if n < p + 1:
        raise DomainError(f"need n >= d + 2 = {p + 1} rows, got {n}")
    sampler = JointGaussian.fit(data).conditional(0)
    logger.info("gaussian_sampler_fitted", n=n, d=p - 1, cond_std=sampler.cond_std)
    return sampler
