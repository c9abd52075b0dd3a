"""
Hyper-parameter ladder of online lasso models.

L rungs share one training window and its sufficient statistics; each keeps its
own warm-started coefficients at its own eta. Every incoming point is first
scored by each rung (prequential holdout), then absorbed. The rung with the
smallest trailing holdout error is the running model, and snapshots of it score
batches without seeing them.
"""

from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Deque, Optional, Union

import numpy as np
import structlog

from ..core.config import ModelConfig
from ..core.errors import DimensionMismatchError, EmptyHoldoutError, InsufficientWarmupError
from ..core.types import Observation
from .lasso import GramStats, LassoState, eta_grid, fit_path, fold_scaling

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class ModelSnapshot:
    """Frozen copy of a model's coefficients on raw features."""

    beta: np.ndarray
    intercept: float
    frozen_at: int
    eta: float = float("nan")

    def __post_init__(self) -> None:
        beta = np.array(self.beta, dtype=float)
        beta.flags.writeable = False
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "intercept", float(self.intercept))

    def coefficients(self) -> tuple[np.ndarray, float]:
        return self.beta, self.intercept

    def to_dict(self) -> dict[str, Any]:
        return {
            "beta": self.beta.tolist(),
            "intercept": self.intercept,
            "frozen_at": self.frozen_at,
            "eta": self.eta,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ModelSnapshot":
        return cls(data["beta"], data["intercept"], int(data["frozen_at"]), float(data["eta"]))


Predictor = Union[ModelSnapshot, LassoState, "ModelLadder"]


def predict(model: Predictor, x: float, z: Sequence[float]) -> float:
    """intercept + beta . [x, z]"""
    beta, intercept = model.coefficients()
    z_vec = np.asarray(z, dtype=float)
    if z_vec.shape[0] + 1 != beta.shape[0]:
        raise DimensionMismatchError(beta.shape[0] - 1, z_vec.shape[0])
    return float(intercept + beta[0] * x + z_vec @ beta[1:])


def predict_batch(model: Predictor, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """
    Vectorised predictions.

    Args:
        x: Feature values of shape (..., n); leading axes index dummy copies.
        z: Covariates of shape (n, d), shared across copies.
    """
    beta, intercept = model.coefficients()
    if z.shape[1] + 1 != beta.shape[0]:
        raise DimensionMismatchError(beta.shape[0] - 1, z.shape[1])
    return intercept + beta[0] * np.asarray(x, dtype=float) + z @ beta[1:]


class ModelLadder:
    """L lasso rungs on an ascending eta grid over a shared window."""

    def __init__(
        self,
        etas: np.ndarray,
        p: int,
        config: Optional[ModelConfig] = None,
        holdout_len: int = 25,
        shift: Optional[np.ndarray] = None,
        scale: Optional[np.ndarray] = None,
    ):
        self.config = config or ModelConfig()
        self.etas = np.asarray(etas, dtype=float)
        self.p = p
        self.stats = GramStats(p)
        self.window: Deque[tuple[np.ndarray, float]] = deque()
        self.betas = np.zeros((self.etas.size, p))
        self.errors: Deque[np.ndarray] = deque(maxlen=holdout_len)
        self.selected = 0
        self.shift = shift
        self.scale = scale

    @property
    def n_rungs(self) -> int:
        return int(self.etas.size)

    @property
    def holdout_len(self) -> int:
        return int(self.errors.maxlen or 0)

    @property
    def n_seen(self) -> int:
        return self.stats.n_seen

    def _row(self, obs: Observation) -> np.ndarray:
        row = obs.features()
        if row.shape[0] != self.p:
            raise DimensionMismatchError(self.p - 1, obs.d)
        if self.shift is not None and self.scale is not None:
            row = (row - self.shift) / self.scale
        return row

    def _absorb(self, row: np.ndarray, y: float) -> None:
        self.stats.add(row, y)
        limit = self.config.window
        if limit is None:
            # statistics are additive; rows are kept only for eviction
            return
        self.window.append((row, y))
        if len(self.window) > limit:
            old_row, old_y = self.window.popleft()
            self.stats.remove(old_row, old_y)

    def fit_batch(self, observations: Sequence[Observation]) -> int:
        """Absorb points and fit every rung to convergence; returns sweeps used."""
        for obs in observations:
            self._absorb(self._row(obs), obs.y)
        cov, cross, vyy = self.stats.centered()
        _, sweeps = fit_path(
            cov,
            cross,
            self.etas,
            self.betas,
            self.config.warmup_max_sweeps,
            tol=self.config.warmup_tol,
            vyy=vyy,
        )
        return sweeps

    def update(self, obs: Observation, sweeps: Optional[int] = None) -> None:
        """Score obs with every rung, absorb it, then warm-start sweep all rungs."""
        row = self._row(obs)
        if self.stats.n > 0:
            mx, my = self.stats.means()
            predictions = my + self.betas @ (row - mx)
            self.errors.append((obs.y - predictions) ** 2)
        self._absorb(row, obs.y)
        cov, cross, _ = self.stats.centered()
        fit_path(cov, cross, self.etas, self.betas, sweeps or self.config.sweeps_per_step)

    def holdout_errors(self) -> np.ndarray:
        """Mean squared holdout error per rung."""
        if not self.errors:
            raise EmptyHoldoutError("no holdout errors recorded yet")
        return np.mean(np.vstack(self.errors), axis=0)

    def refresh_selection(self) -> int:
        """Re-select the running rung when holdout errors exist."""
        if self.errors:
            self.selected = select_eta(self)
        return self.selected

    def coefficients(self, index: Optional[int] = None) -> tuple[np.ndarray, float]:
        """(beta, intercept) of a rung on raw features; the selected rung by default."""
        i = self.selected if index is None else index
        beta = self.betas[i]
        mx, my = self.stats.means()
        return fold_scaling(beta, float(my - mx @ beta), self.shift, self.scale)

    @classmethod
    def warm_start(
        cls,
        observations: Sequence[Observation],
        config: Optional[ModelConfig] = None,
        max_batch: int = 1,
    ) -> "ModelLadder":
        """
        Build a ladder from the warm-up samples.

        The eta grid is scaled on all warm-up data. The first half is fitted to
        convergence and the second half is absorbed online so that holdout
        errors exist before the first snapshot.

        Raises:
            InsufficientWarmupError: If no observations are given.
        """
        config = config or ModelConfig()
        if not observations:
            raise InsufficientWarmupError(1, 0)
        features = np.vstack([obs.features() for obs in observations])
        ys = np.array([obs.y for obs in observations])

        shift = scale = None
        if config.standardize:
            shift = features.mean(axis=0)
            scale = features.std(axis=0)
            scale[scale < 1e-12] = 1.0
            features = (features - shift) / scale

        etas = eta_grid(
            GramStats.from_arrays(features, ys),
            config.n_rungs,
            config.eta_min_factor,
            config.eta_max_factor,
        )
        ladder = cls(
            etas,
            features.shape[1],
            config=config,
            holdout_len=config.holdout_len(max_batch),
            shift=shift,
            scale=scale,
        )
        half = max(1, len(observations) // 2)
        sweeps = ladder.fit_batch(observations[:half])
        for obs in observations[half:]:
            ladder.update(obs)
        ladder.refresh_selection()
        logger.debug(
            "ladder_warm_started",
            n_init=len(observations),
            batch_sweeps=sweeps,
            selected=ladder.selected,
            eta=float(ladder.etas[ladder.selected]),
        )
        return ladder

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.model_dump(mode="json"),
            "etas": self.etas.tolist(),
            "p": self.p,
            "holdout_len": self.holdout_len,
            "betas": self.betas.tolist(),
            "errors": [e.tolist() for e in self.errors],
            "selected": self.selected,
            "window": [[row.tolist(), y] for row, y in self.window],
            "stats": self.stats.to_dict(),
            "shift": None if self.shift is None else self.shift.tolist(),
            "scale": None if self.scale is None else self.scale.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ModelLadder":
        """Rebuild a ladder exactly as serialised by to_dict."""
        ladder = cls(
            np.array(data["etas"], dtype=float),
            int(data["p"]),
            config=ModelConfig.model_validate(data["config"]),
            holdout_len=int(data["holdout_len"]),
            shift=None if data["shift"] is None else np.array(data["shift"], dtype=float),
            scale=None if data["scale"] is None else np.array(data["scale"], dtype=float),
        )
        ladder.betas = np.array(data["betas"], dtype=float).reshape(ladder.etas.size, ladder.p)
        for errors in data["errors"]:
            ladder.errors.append(np.array(errors, dtype=float))
        ladder.selected = int(data["selected"])
        ladder.window.extend((np.array(row, dtype=float), float(y)) for row, y in data["window"])
        ladder.stats = GramStats.from_dict(data["stats"])
        return ladder


def online_update(ladder: ModelLadder, obs: Observation, sweeps_per_step: int = 3) -> ModelLadder:
    """Absorb one observation into every rung without refitting from scratch."""
    ladder.update(obs, sweeps_per_step)
    return ladder


def select_eta(ladder: ModelLadder) -> int:
    """
    Index of the rung with the smallest mean holdout error.

    np.argmin returns the first minimum, and the grid ascends, so ties go to
    the smallest eta.

    Raises:
        EmptyHoldoutError: If no holdout error has been recorded.
    """
    return int(np.argmin(ladder.holdout_errors()))


def snapshot(ladder: ModelLadder, t: int) -> ModelSnapshot:
    """Freeze the selected rung's coefficients at test-clock t."""
    ladder.refresh_selection()
    beta, intercept = ladder.coefficients()
    return ModelSnapshot(beta, intercept, t, float(ladder.etas[ladder.selected]))
