"""
Antisymmetric betting-score functions g(q, q_tilde).

q is the statistic on the original batch and q_tilde the statistic on a dummy
batch. A positive score means the dummy did worse, which is evidence that the
tested feature matters.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..core.config import ScoreKind, TestConfig
from ..core.errors import DomainError

EPSILON_GUARD = 1e-12
TANH_SLOPE = 20.0

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class ScoreFn:
    """g(a, b) with |g| <= magnitude, g(a, b) = -g(b, a), non-decreasing in b."""

    kind: ScoreKind = ScoreKind.SIGN
    magnitude: float = 1.0
    epsilon_guard: float = EPSILON_GUARD

    def __post_init__(self) -> None:
        if not 0.0 < self.magnitude <= 1.0:
            raise DomainError(f"magnitude must lie in (0, 1], got {self.magnitude}")
        if not self.epsilon_guard > 0.0:
            raise DomainError(f"epsilon_guard must be positive, got {self.epsilon_guard}")

    @classmethod
    def from_config(cls, config: TestConfig) -> "ScoreFn":
        return cls(config.score_kind, config.score_magnitude)

    def __call__(self, q: ArrayLike, q_tilde: ArrayLike) -> np.ndarray:
        """Elementwise score; broadcasts q against an array of q_tilde."""
        a = np.asarray(q, dtype=float)
        b = np.asarray(q_tilde, dtype=float)
        diff = b - a
        if self.kind == ScoreKind.SIGN:
            return self.magnitude * np.sign(diff)
        scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), self.epsilon_guard)
        ratio = TANH_SLOPE * diff / scale
        # odd by construction, so swapping arguments negates the score bit for bit
        return self.magnitude * np.sign(ratio) * np.tanh(np.abs(ratio))


@dataclass(frozen=True)
class BettingScore:
    """A bounded bet W; q and q_tilde record the statistics behind it."""

    w: float
    q: float = float("nan")
    q_tilde: float = float("nan")

    def __post_init__(self) -> None:
        if not -1.0 <= self.w <= 1.0:
            raise DomainError(f"betting score must lie in [-1, 1], got {self.w}")


def score(fn: ScoreFn, q: float, q_tilde: float) -> BettingScore:
    """Score one (q, q_tilde) pair."""
    return BettingScore(float(fn(q, q_tilde)), float(q), float(q_tilde))
