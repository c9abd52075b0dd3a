"""
Model-fitting procedures for the offline baselines.

A trainer fits a linear model on a feature matrix whose first column is the
tested feature, and defines the statistic the CRT compares: smaller means the
features explain y better.
"""

from dataclasses import dataclass
from typing import Protocol

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from sklearn.model_selection import KFold

from ..core.errors import DomainError, SingularCovarianceError
from ..model.ladder import ModelSnapshot
from ..model.lasso import GramStats, eta_grid, fit_path


class Trainer(Protocol):
    """Fits a model and scores a dataset."""

    def fit(self, features: np.ndarray, y: np.ndarray) -> ModelSnapshot:
        ...

    def statistic(self, features: np.ndarray, y: np.ndarray) -> float:
        ...


def _mse(model: ModelSnapshot, features: np.ndarray, y: np.ndarray) -> float:
    beta, intercept = model.coefficients()
    residual = y - intercept - features @ beta
    return float(np.mean(residual**2))


def _intercepts(stats: GramStats, betas: np.ndarray) -> np.ndarray:
    mx, my = stats.means()
    return my - betas @ mx


@dataclass(frozen=True)
class LassoCVTrainer:
    """
    Lasso with eta chosen by k-fold cross-validation over the online ladder's grid.

    The statistic is the out-of-fold MSE at the selected eta.
    """

    folds: int = 5
    n_rungs: int = 20
    eta_min_factor: float = 1e-3
    eta_max_factor: float = 1e1
    max_sweeps: int = 500
    tol: float = 1e-8

    def _cv_errors(self, features: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = features.shape[0]
        if n < 2:
            raise DomainError(f"cross-validation needs at least 2 rows, got {n}")
        etas = eta_grid(
            GramStats.from_arrays(features, y),
            self.n_rungs,
            self.eta_min_factor,
            self.eta_max_factor,
        )
        squared = np.zeros(etas.size)
        splitter = KFold(n_splits=min(self.folds, n))
        for train_idx, val_idx in splitter.split(features):
            stats = GramStats.from_arrays(features[train_idx], y[train_idx])
            cov, cross, vyy = stats.centered()
            betas = np.zeros((etas.size, features.shape[1]))
            fit_path(cov, cross, etas, betas, self.max_sweeps, tol=self.tol, vyy=vyy)
            predictions = _intercepts(stats, betas)[:, None] + betas @ features[val_idx].T
            squared += ((predictions - y[val_idx][None, :]) ** 2).sum(axis=1)
        return etas, squared / n

    def fit(self, features: np.ndarray, y: np.ndarray) -> ModelSnapshot:
        etas, errors = self._cv_errors(features, y)
        best = int(np.argmin(errors))
        stats = GramStats.from_arrays(features, y)
        cov, cross, vyy = stats.centered()
        betas = np.zeros((1, features.shape[1]))
        fit_path(cov, cross, etas[best : best + 1], betas, self.max_sweeps, tol=self.tol, vyy=vyy)
        return ModelSnapshot(betas[0], float(_intercepts(stats, betas)[0]), 0, float(etas[best]))

    def statistic(self, features: np.ndarray, y: np.ndarray) -> float:
        _, errors = self._cv_errors(features, y)
        return float(errors.min())


@dataclass(frozen=True)
class LeastSquaresTrainer:
    """
    Ordinary least squares with a tiny ridge for numerical stability.

    The statistic is the in-sample MSE. Cheap enough for Monte-Carlo runs with
    hundreds of dummy refits.
    """

    ridge_factor: float = 1e-8

    def fit(self, features: np.ndarray, y: np.ndarray) -> ModelSnapshot:
        stats = GramStats.from_arrays(features, y)
        cov, cross, _ = stats.centered()
        p = cov.shape[0]
        ridge = self.ridge_factor * max(float(np.trace(cov)) / p, 1e-300)
        try:
            beta = cho_solve(cho_factor(cov + ridge * np.eye(p)), cross)
        except LinAlgError as e:
            raise SingularCovarianceError(f"least-squares system is singular: {e}") from e
        mx, my = stats.means()
        return ModelSnapshot(beta, float(my - mx @ beta), 0, 0.0)

    def statistic(self, features: np.ndarray, y: np.ndarray) -> float:
        return _mse(self.fit(features, y), features, y)


def holdout_mse(model: ModelSnapshot, features: np.ndarray, y: np.ndarray) -> float:
    """MSE of a fitted model on held-out rows."""
    return _mse(model, features, y)
