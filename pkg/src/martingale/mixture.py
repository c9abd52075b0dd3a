"""
Discrete uniform mixture of base martingales.

For grid points v_i = (i - 0.5) / V the base wealth is prod_j (1 + v_i W_j) and
the mixture wealth is its grid mean. Products are kept as logs so long runs
neither overflow nor underflow; an exact zero (v = 1 betting against W = -1)
is -inf.
"""

from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np
from scipy.special import logsumexp

from ..betting.scores import BettingScore
from ..core.errors import DomainError


def midpoint_grid(size: int) -> np.ndarray:
    """v_i = (i - 0.5) / size for i = 1..size."""
    if size < 1:
        raise DomainError(f"grid size must be >= 1, got {size}")
    return (np.arange(1, size + 1) - 0.5) / size


@dataclass
class MixtureState:
    """Running log-products of every grid point plus the bet history."""

    grid: np.ndarray
    log_products: np.ndarray = field(default=None)  # type: ignore[assignment]
    history: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.grid = np.asarray(self.grid, dtype=float)
        if self.log_products is None:
            self.log_products = np.zeros_like(self.grid)
        self._wealth = self._mean_wealth()

    @classmethod
    def fresh(cls, grid_size: int) -> "MixtureState":
        return cls(midpoint_grid(grid_size))

    @property
    def num_bets(self) -> int:
        return len(self.history)

    @property
    def products(self) -> np.ndarray:
        return np.exp(self.log_products)

    @property
    def wealth(self) -> float:
        return self._wealth

    def log_wealth(self) -> float:
        return float(np.log(self._wealth)) if self._wealth > 0 else float("-inf")

    def _mean_wealth(self) -> float:
        if np.all(np.isneginf(self.log_products)):
            return 0.0
        return float(np.exp(logsumexp(self.log_products) - np.log(self.grid.size)))

    def bet(self, w: float) -> None:
        if not -1.0 <= w <= 1.0:
            raise DomainError(f"bet must lie in [-1, 1], got {w}")
        with np.errstate(divide="ignore"):
            self.log_products = self.log_products + np.log1p(self.grid * w)
        self.history.append(float(w))
        self._wealth = self._mean_wealth()

    def to_dict(self) -> dict[str, Any]:
        return {
            "grid_size": int(self.grid.size),
            "log_products": self.log_products.tolist(),
            "history": list(self.history),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "MixtureState":
        return cls(
            midpoint_grid(int(data["grid_size"])),
            np.array(data["log_products"], dtype=float),
            [float(w) for w in data["history"]],
        )


def mixture_update(state: MixtureState, w: Union[BettingScore, float]) -> MixtureState:
    """Multiply every base wealth by (1 + v_i w)."""
    state.bet(w.w if isinstance(w, BettingScore) else float(w))
    return state


def base_wealth(state: MixtureState, v: float) -> float:
    """
    prod_j (1 + v W_j) for one betting fraction.

    Grid points are read from the running products; any other v is recomputed
    from the bet history.
    """
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"v must lie in [0, 1], got {v}")
    hits = np.flatnonzero(state.grid == v)
    if hits.size:
        return float(np.exp(state.log_products[hits[0]]))
    if not state.history:
        return 1.0
    return float(np.prod(1.0 + v * np.asarray(state.history)))
