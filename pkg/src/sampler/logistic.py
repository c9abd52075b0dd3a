"""
Bernoulli-logistic sampler for binary features.

The success probability is sigmoid(weights.z + bias), fitted by L2-penalised
logistic regression with the penalty chosen by cross-validated log-loss.
"""

from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np
import structlog
from scipy.special import expit
from sklearn.linear_model import LogisticRegression, LogisticRegressionCV

from ..core.errors import DegenerateClassError, DimensionMismatchError, DomainError
from ..core.rng import RngStream

logger = structlog.get_logger(__name__)

DEFAULT_PENALTIES = tuple(float(v) for v in np.logspace(-3, 1, 10))


@dataclass(frozen=True, eq=False)
class BernoulliLogisticSampler:
    """X | Z ~ Bernoulli(sigmoid(weights.z + bias))."""

    weights: np.ndarray
    bias: float
    l2_penalty: float

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float).ravel()
        weights.flags.writeable = False
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", float(self.bias))
        if not self.l2_penalty > 0:
            raise DomainError(f"l2_penalty must be positive, got {self.l2_penalty}")

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])

    def probability(self, z: np.ndarray) -> np.ndarray:
        """Success probability for each covariate row."""
        return expit(np.asarray(z, dtype=float) @ self.weights + self.bias)

    def draw(self, z: np.ndarray, rng: RngStream, copies: int = 1) -> np.ndarray:
        if z.shape[1] != self.dim:
            raise DimensionMismatchError(self.dim, z.shape[1])
        uniforms = rng.uniform(size=(copies, z.shape[0]))
        return (uniforms < self.probability(z)[None, :]).astype(float)

    def to_dict(self) -> dict[str, Any]:
        return {"weights": self.weights.tolist(), "bias": self.bias, "l2_penalty": self.l2_penalty}

    @classmethod
    def from_dict(cls, params: dict[str, Any]) -> "BernoulliLogisticSampler":
        return cls(params["weights"], params["bias"], params["l2_penalty"])


def fit_logistic_sampler(
    unlabeled: np.ndarray,
    l2_penalty: Optional[float] = None,
    cv_folds: int = 10,
    penalties: Sequence[float] = DEFAULT_PENALTIES,
) -> BernoulliLogisticSampler:
    """
    Fit a Bernoulli-logistic sampler on (x, z) rows with binary x.

    The penalty is on the mean log-loss, lambda/2 * ||w||^2, which maps to
    sklearn's C = 1 / (lambda * n).

    Args:
        unlabeled: Matrix of shape (n, d + 1) with x in {0, 1} in column 0.
        l2_penalty: Fixed penalty; when None it is chosen from `penalties` by CV.
        cv_folds: Number of stratified folds.
        penalties: Candidate penalties.

    Raises:
        DomainError: If x is not binary.
        DegenerateClassError: If x holds a single class.
    """
    data = np.asarray(unlabeled, dtype=float)
    if data.ndim != 2 or data.shape[1] < 2:
        raise DomainError(f"expected an n x (d + 1) matrix with d >= 1, got shape {data.shape}")
    x, z = data[:, 0], data[:, 1:]
    if not np.all((x == 0.0) | (x == 1.0)):
        raise DomainError("x column must be binary (0 or 1)")
    labels = x.astype(int)
    counts = np.bincount(labels, minlength=2)
    if counts.min() == 0:
        raise DegenerateClassError("x column is constant; need both classes")

    n = len(labels)
    folds = min(cv_folds, int(counts.min()))
    if l2_penalty is None and folds >= 2:
        grid = sorted(float(p) for p in penalties)
        model = LogisticRegressionCV(
            Cs=[1.0 / (p * n) for p in grid],
            cv=folds,
            scoring="neg_log_loss",
            max_iter=1000,
        )
        model.fit(z, labels)
        chosen = 1.0 / (float(model.C_[0]) * n)
    else:
        # too few minority rows to cross-validate: fall back to the strongest penalty
        chosen = float(l2_penalty) if l2_penalty is not None else float(max(penalties))
        model = LogisticRegression(C=1.0 / (chosen * n), max_iter=1000)
        model.fit(z, labels)

    sampler = BernoulliLogisticSampler(model.coef_[0], float(model.intercept_[0]), chosen)
    logger.info("logistic_sampler_fitted", n=n, d=z.shape[1], l2_penalty=chosen, folds=folds)
    return sampler
