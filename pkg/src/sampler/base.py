"""
Sampler protocol and the sampling entry points.

A sampler draws dummy features from an estimate of the conditional law of X
given Z. The interface only ever receives covariates; assert_response_blind
checks that no implementation can be handed responses.
"""

import inspect
from collections.abc import Sequence
from typing import Any, Protocol, Union, runtime_checkable

import numpy as np

from ..core.errors import DimensionMismatchError, DomainError, ResponseLeakError
from ..core.rng import RngStream

_RESPONSE_NAMES = frozenset({"y", "ys", "response", "responses", "target", "targets", "label"})


@runtime_checkable
class DummySampler(Protocol):
    """Conditional generator of X given Z."""

    @property
    def dim(self) -> int:
        """Covariate dimension d."""
        ...

    def draw(self, z: np.ndarray, rng: RngStream, copies: int = 1) -> np.ndarray:
        """
        Draw dummy features.

        Args:
            z: Covariates of shape (n, d).
            rng: Random stream to consume.
            copies: Number of independent copies.

        Returns:
            Array of shape (copies, n).
        """
        ...

    def to_dict(self) -> dict[str, Any]:
        ...


def _as_matrix(z: Union[np.ndarray, Sequence[Sequence[float]]], dim: int) -> np.ndarray:
    matrix = np.asarray(z, dtype=float)
    if matrix.ndim == 1:
        matrix = matrix[None, :] if matrix.size else matrix.reshape(0, dim)
    if matrix.shape[1] != dim:
        raise DimensionMismatchError(dim, matrix.shape[1])
    return matrix


def sample_dummy(sampler: DummySampler, z: Sequence[float], rng: RngStream) -> float:
    """One draw of X given a single covariate vector z."""
    vector = np.asarray(z, dtype=float)
    if vector.ndim != 1 or vector.shape[0] != sampler.dim:
        raise DimensionMismatchError(sampler.dim, vector.size)
    return float(sampler.draw(vector[None, :], rng)[0, 0])


def sample_dummy_batches(
    sampler: DummySampler,
    z_batch: Union[np.ndarray, Sequence[Sequence[float]]],
    k: int,
    rng: RngStream,
) -> np.ndarray:
    """
    K independent dummy copies of a batch.

    Returns:
        Array of shape (k, len(z_batch)); row i is the i-th copy.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    matrix = _as_matrix(z_batch, sampler.dim)
    if matrix.shape[0] == 0:
        return np.empty((k, 0))
    return sampler.draw(matrix, rng, copies=k)


def assert_response_blind(sampler: Any) -> None:
    """
    Audit hook: fail if the sampler's draw method could receive responses.

    Raises:
        ResponseLeakError: If draw takes *args, **kwargs or a response-like name.
    """
    draw = getattr(sampler, "draw", None)
    if draw is None or not callable(draw):
        raise ResponseLeakError(f"{type(sampler).__name__} has no draw method")
    for name, param in inspect.signature(draw).parameters.items():
        if param.kind in (inspect.Parameter.VAR_POSITIONAL, inspect.Parameter.VAR_KEYWORD):
            raise ResponseLeakError(
                f"{type(sampler).__name__}.draw accepts arbitrary arguments via {name}"
            )
        if name.lower() in _RESPONSE_NAMES:
            raise ResponseLeakError(f"{type(sampler).__name__}.draw takes a response ({name})")
