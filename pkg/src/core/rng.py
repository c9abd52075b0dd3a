"""
Reproducible random streams.

An RngStream is identified by (seed, stream_id) plus an optional path of child
indices. Draws come from numpy's counter-based Philox generator keyed through
SeedSequence spawn keys, so identical identities replay identical sequences and
distinct identities are independent.
"""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

_UINT64 = 2**64


@dataclass
class RngStream:
    """A seeded, splittable random stream."""

    seed: int
    stream_id: int = 0
    path: tuple[int, ...] = ()
    _generator: Optional[np.random.Generator] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 0 <= self.seed < _UINT64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not 0 <= self.stream_id < _UINT64:
            raise ValueError(f"stream_id must be a 64-bit unsigned integer, got {self.stream_id}")

    @property
    def generator(self) -> np.random.Generator:
        """The underlying numpy Generator, created on first use."""
        if self._generator is None:
            seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.path))
            self._generator = np.random.Generator(np.random.Philox(seq))
        return self._generator

    def child(self, index: int) -> "RngStream":
        """Independent sub-stream keyed by index; does not advance this stream."""
        return RngStream(self.seed, self.stream_id, (*self.path, int(index)))

    def normal(self, loc: Any = 0.0, scale: Any = 1.0, size: Any = None) -> Any:
        return self.generator.normal(loc, scale, size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size: Any = None) -> Any:
        return self.generator.uniform(low, high, size)

    def get_state(self) -> dict[str, Any]:
        """JSON-safe snapshot of the stream identity and position."""
        raw = self.generator.bit_generator.state
        return {
            "seed": self.seed,
            "stream_id": self.stream_id,
            "path": list(self.path),
            "bit_generator": _to_jsonable(raw),
        }

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> "RngStream":
        """Rebuild a stream at the exact position captured by get_state."""
        stream = cls(int(state["seed"]), int(state["stream_id"]), tuple(state["path"]))
        generator = stream.generator
        generator.bit_generator.state = _from_jsonable(state["bit_generator"])
        return stream


def _to_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _to_jsonable(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return {"__ndarray__": [int(x) for x in value.ravel()], "dtype": str(value.dtype)}
    if isinstance(value, np.integer):
        return int(value)
    return value


def _from_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        if "__ndarray__" in value:
            return np.array(value["__ndarray__"], dtype=value["dtype"])
        return {k: _from_jsonable(v) for k, v in value.items()}
    return value
