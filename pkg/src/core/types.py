"""
Domain types shared by every module.
"""

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .errors import DimensionMismatchError, IngestionError, NonFiniteValueError


class Decision(str, Enum):
    """Outcome of a threshold check or of a whole test."""

    REJECTED = "rejected"
    NOT_REJECTED = "not_rejected"
    CONTINUE = "continue"


@dataclass(frozen=True)
class Observation:
    """One (x, y, z) triplet of the stream."""

    x: float
    y: float
    z: tuple[float, ...]

    @property
    def d(self) -> int:
        return len(self.z)

    def features(self) -> np.ndarray:
        """The model input row [x, z]."""
        return np.array((self.x, *self.z), dtype=float)

    def to_record(self) -> dict[str, Any]:
        return {"x": self.x, "y": self.y, "z": list(self.z)}


@dataclass
class TestOutcome:
    """
    Result of one sequential test.

    stop_time counts test-clock steps after the warm-up; warmup is the number
    of samples consumed to train the initial model.
    """

    decision: Decision
    stop_time: int
    final_wealth: float
    trajectory: list[tuple[int, float]]
    warmup: int = 0
    batch_wealth: dict[int, float] = field(default_factory=dict)
    base_wealth: dict[float, float] = field(default_factory=dict)

    @property
    def rejected(self) -> bool:
        return self.decision == Decision.REJECTED

    @property
    def samples_consumed(self) -> int:
        """Total stream reads, warm-up included."""
        return self.warmup + self.stop_time

    def wealth_at(self, t: int) -> float:
        """Wealth held at test-clock t (the last value at or before t)."""
        value = 1.0
        for step, wealth in self.trajectory:
            if step > t:
                break
            value = wealth
        return value

    def to_dict(self) -> dict[str, Any]:
        return {
            "decision": self.decision.value,
            "stop_time": self.stop_time,
            "final_wealth": self.final_wealth,
            "warmup": self.warmup,
            "samples_consumed": self.samples_consumed,
            "batch_wealth": {str(b): w for b, w in self.batch_wealth.items()},
            "base_wealth": {str(v): w for v, w in self.base_wealth.items()},
            "trajectory": [[t, s] for t, s in self.trajectory],
        }


def _as_real(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
        raise IngestionError(f"{name} must be a number, got {type(value).__name__}")
    number = float(value)
    if not math.isfinite(number):
        raise NonFiniteValueError(f"{name} is not finite: {number}")
    return number


def validate_observation(raw: Mapping[str, Any], d: int) -> Observation:
    """
    Build an Observation from a parsed record.

    Args:
        raw: Mapping with keys "x", "y" and "z".
        d: Expected covariate dimension.

    Returns:
        A validated Observation.

    Raises:
        DimensionMismatchError: If len(z) != d.
        NonFiniteValueError: If any entry is NaN or infinite.
        IngestionError: If a key is missing or has the wrong type.
    """
    missing = [key for key in ("x", "y", "z") if key not in raw]
    if missing:
        raise IngestionError(f"record is missing keys {missing}")

    z_raw = raw["z"]
    if isinstance(z_raw, (str, bytes)) or not hasattr(z_raw, "__len__"):
        raise IngestionError(f"z must be an array, got {type(z_raw).__name__}")
    if len(z_raw) != d:
        raise DimensionMismatchError(d, len(z_raw))

    x = _as_real(raw["x"], "x")
    y = _as_real(raw["y"], "y")
    z = tuple(_as_real(value, f"z[{i}]") for i, value in enumerate(z_raw))
    return Observation(x, y, z)


def observations_from_arrays(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> list[Observation]:
    """Pack column arrays into Observations without re-validating."""
    return [
        Observation(float(xi), float(yi), tuple(float(v) for v in zi))
        for xi, yi, zi in zip(x, y, z)
    ]


def observations_to_arrays(
    observations: "list[Observation]",
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unpack Observations into (x, y, z) arrays of shapes (n,), (n,), (n, d)."""
    n = len(observations)
    if n == 0:
        return np.empty(0), np.empty(0), np.empty((0, 0))
    x = np.fromiter((o.x for o in observations), dtype=float, count=n)
    y = np.fromiter((o.y for o in observations), dtype=float, count=n)
    z = np.array([o.z for o in observations], dtype=float).reshape(n, -1)
    return x, y, z
