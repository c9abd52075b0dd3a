"""
Lasso by cyclic coordinate descent on sufficient statistics.

The objective is

    (1/n) * sum (y - b0 - x.beta)^2 + eta * ||beta||_1

with an unpenalised intercept. Profiling out b0 = mean(y) - mean(x).beta leaves
a problem in the centred Gram matrix C and centred cross-moment c:

    f(beta) = vyy - 2 c.beta + beta' C beta + eta * ||beta||_1

so coordinate j updates to soft(c_j - sum_{k != j} C_jk beta_k, eta / 2) / C_jj.
The statistics are additive, which makes online updates and window eviction
O(p^2) and lets several eta values share one pass.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Deque, Optional

import numpy as np

from ..core.errors import DimensionMismatchError


def soft_threshold(x: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


@dataclass
class GramStats:
    """Running sums over a training window of rows (features, y)."""

    p: int
    n: int = 0
    n_seen: int = 0
    sx: np.ndarray = field(init=False)
    sy: float = 0.0
    sxx: np.ndarray = field(init=False)
    sxy: np.ndarray = field(init=False)
    syy: float = 0.0

    def __post_init__(self) -> None:
        self.sx = np.zeros(self.p)
        self.sxx = np.zeros((self.p, self.p))
        self.sxy = np.zeros(self.p)

    @classmethod
    def from_arrays(cls, features: np.ndarray, y: np.ndarray) -> "GramStats":
        features = np.asarray(features, dtype=float)
        y = np.asarray(y, dtype=float)
        stats = cls(features.shape[1])
        stats.n = stats.n_seen = features.shape[0]
        stats.sx = features.sum(axis=0)
        stats.sy = float(y.sum())
        stats.sxx = features.T @ features
        stats.sxy = features.T @ y
        stats.syy = float(y @ y)
        return stats

    def add(self, row: np.ndarray, y: float) -> None:
        if row.shape[0] != self.p:
            raise DimensionMismatchError(self.p, row.shape[0], what="feature row")
        self.n += 1
        self.n_seen += 1
        self.sx += row
        self.sy += y
        self.sxx += np.outer(row, row)
        self.sxy += row * y
        self.syy += y * y

    def remove(self, row: np.ndarray, y: float) -> None:
        """Evict a row previously added (bounded windows)."""
        self.n -= 1
        self.sx -= row
        self.sy -= y
        self.sxx -= np.outer(row, row)
        self.sxy -= row * y
        self.syy -= y * y

    def means(self) -> tuple[np.ndarray, float]:
        if self.n == 0:
            return np.zeros(self.p), 0.0
        return self.sx / self.n, self.sy / self.n

    def centered(self) -> tuple[np.ndarray, np.ndarray, float]:
        """Centred (C, c, vyy): covariance, cross-covariance and variance of y."""
        mx, my = self.means()
        if self.n == 0:
            return np.zeros((self.p, self.p)), np.zeros(self.p), 0.0
        cov = self.sxx / self.n - np.outer(mx, mx)
        cross = self.sxy / self.n - mx * my
        vyy = self.syy / self.n - my * my
        return cov, cross, vyy

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "n": self.n,
            "n_seen": self.n_seen,
            "sx": self.sx.tolist(),
            "sy": self.sy,
            "sxx": self.sxx.tolist(),
            "sxy": self.sxy.tolist(),
            "syy": self.syy,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GramStats":
        stats = cls(int(data["p"]), int(data["n"]), int(data["n_seen"]))
        stats.sx = np.array(data["sx"], dtype=float)
        stats.sy = float(data["sy"])
        stats.sxx = np.array(data["sxx"], dtype=float).reshape(stats.p, stats.p)
        stats.sxy = np.array(data["sxy"], dtype=float)
        stats.syy = float(data["syy"])
        return stats


def path_objective(
    cov: np.ndarray, cross: np.ndarray, vyy: float, betas: np.ndarray, etas: np.ndarray
) -> np.ndarray:
    """Objective of each row of `betas` (shape (L, p)) at its own eta."""
    betas = np.atleast_2d(betas)
    quad = np.einsum("lj,jk,lk->l", betas, cov, betas)
    return vyy - 2.0 * betas @ cross + quad + np.asarray(etas) * np.abs(betas).sum(axis=1)


def fit_path(
    cov: np.ndarray,
    cross: np.ndarray,
    etas: np.ndarray,
    betas: np.ndarray,
    sweeps: int,
    tol: Optional[float] = None,
    vyy: float = 0.0,
) -> tuple[np.ndarray, int]:
    """
    Coordinate descent for several eta values at once.

    Args:
        cov: Centred Gram matrix C, shape (p, p).
        cross: Centred cross-moment c, shape (p,).
        etas: Penalties, shape (L,).
        betas: Warm start, shape (L, p); updated in place.
        sweeps: Maximum number of full cyclic passes.
        tol: Stop once every rung's objective changes by less than
            tol * max(1, |objective|) in one pass. None runs all sweeps.
        vyy: Variance of y, only used to scale the stopping rule.

    Returns:
        (betas, sweeps_run)
    """
    etas = np.asarray(etas, dtype=float)
    half = etas / 2.0
    diag = np.diag(cov)
    previous = path_objective(cov, cross, vyy, betas, etas) if tol is not None else None
    for sweep in range(1, sweeps + 1):
        for j in range(cov.shape[0]):
            if diag[j] <= 0.0:
                betas[:, j] = 0.0
                continue
            partial = cross[j] - betas @ cov[:, j] + diag[j] * betas[:, j]
            betas[:, j] = soft_threshold(partial, half) / diag[j]
        if previous is not None and tol is not None:
            current = path_objective(cov, cross, vyy, betas, etas)
            if np.all(np.abs(previous - current) <= tol * np.maximum(1.0, np.abs(current))):
                return betas, sweep
            previous = current
    return betas, sweeps


def eta_grid(
    stats: GramStats, n_rungs: int = 20, min_factor: float = 1e-3, max_factor: float = 1e1
) -> np.ndarray:
    """
    Ascending log-spaced penalties scaled by max |centred X'y| / n.

    A zero scale (no covariance with y) falls back to 1.
    """
    _, cross, _ = stats.centered()
    scale = float(np.max(np.abs(cross))) if cross.size else 0.0
    if not scale > 0.0:
        scale = 1.0
    if n_rungs == 1:
        return np.array([scale * min_factor])
    return scale * np.logspace(np.log10(min_factor), np.log10(max_factor), n_rungs)


@dataclass
class LassoState:
    """
    One lasso fit at a fixed eta over a training window.

    shift and scale map raw features to the scale the statistics are kept in;
    coefficients() folds them back so predictions take raw inputs.
    """

    eta: float
    stats: GramStats
    beta: np.ndarray = field(default=None)  # type: ignore[assignment]
    window: Optional[Deque[tuple[np.ndarray, float]]] = None
    shift: Optional[np.ndarray] = None
    scale: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.beta is None:
            self.beta = np.zeros(self.stats.p)
        if self.window is None:
            self.window = deque()

    @classmethod
    def empty(cls, p: int, eta: float) -> "LassoState":
        return cls(eta=eta, stats=GramStats(p))

    @classmethod
    def from_arrays(cls, features: np.ndarray, y: np.ndarray, eta: float) -> "LassoState":
        """Unfitted state whose statistics cover the given rows."""
        state = cls.empty(np.asarray(features).shape[1], eta)
        for row, target in zip(np.asarray(features, dtype=float), np.asarray(y, dtype=float)):
            state.absorb(row, float(target))
        return state

    @property
    def n_seen(self) -> int:
        return self.stats.n_seen

    @property
    def intercept(self) -> float:
        """Profiled intercept mean(y) - mean(x).beta in the statistics' scale."""
        mx, my = self.stats.means()
        return float(my - mx @ self.beta)

    def objective(self) -> float:
        cov, cross, vyy = self.stats.centered()
        return float(path_objective(cov, cross, vyy, self.beta[None, :], np.array([self.eta]))[0])

    def coefficients(self) -> tuple[np.ndarray, float]:
        """(beta, intercept) on raw features."""
        return fold_scaling(self.beta, self.intercept, self.shift, self.scale)

    def absorb(self, row: np.ndarray, y: float, max_window: Optional[int] = None) -> None:
        """
        Add one row to the statistics.

        With max_window set the row is also kept so the oldest can be evicted
        once the window is full; without it nothing but the sums is stored.
        """
        assert self.window is not None
        self.stats.add(row, y)
        if max_window is None:
            return
        self.window.append((row, y))
        while len(self.window) > max_window:
            old_row, old_y = self.window.popleft()
            self.stats.remove(old_row, old_y)


def fold_scaling(
    beta: np.ndarray,
    intercept: float,
    shift: Optional[np.ndarray],
    scale: Optional[np.ndarray],
) -> tuple[np.ndarray, float]:
    """Express coefficients fitted on (row - shift) / scale in raw units."""
    if shift is None or scale is None:
        return beta.copy(), float(intercept)
    raw = beta / scale
    return raw, float(intercept - raw @ shift)


def cd_sweep(state: LassoState, sweeps: int) -> LassoState:
    """Run `sweeps` cyclic passes on the state's window, warm-started from its beta."""
    if state.stats.n == 0:
        return state
    cov, cross, _ = state.stats.centered()
    betas = state.beta[None, :].copy()
    fit_path(cov, cross, np.array([state.eta]), betas, sweeps)
    state.beta = betas[0]
    return state


def lasso_objective(
    features: np.ndarray, y: np.ndarray, beta: np.ndarray, intercept: float, eta: float
) -> float:
    """Objective evaluated directly on data with an explicit intercept."""
    residual = y - intercept - features @ beta
    return float(residual @ residual / len(y) + eta * np.abs(beta).sum())
