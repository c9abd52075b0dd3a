"""
Batch statistics and the de-randomised betting score.
"""

from collections.abc import Sequence

import numpy as np

from ..core.errors import EmptyBatchError
from ..core.rng import RngStream
from ..core.types import Observation, observations_to_arrays
from ..model.ladder import Predictor, predict_batch
from ..sampler.base import DummySampler, sample_dummy_batches
from .scores import BettingScore, ScoreFn


def batch_mse(model: Predictor, batch: Sequence[Observation]) -> float:
    """
    Mean squared prediction error of a model on a batch.

    Raises:
        EmptyBatchError: If the batch is empty.
    """
    if not batch:
        raise EmptyBatchError("cannot compute a statistic on an empty batch")
    x, y, z = observations_to_arrays(list(batch))
    residual = predict_batch(model, x, z) - y
    return float(np.mean(residual**2))


def derandomized_score(
    model: Predictor,
    batch: Sequence[Observation],
    sampler: DummySampler,
    k: int,
    fn: ScoreFn,
    rng: RngStream,
) -> BettingScore:
    """
    Average of g(q, q_tilde_k) over K dummy copies of the batch's x column.

    q is computed once on the original batch. The K copies are scored as one
    (K, b) array and averaged in a fixed order.

    Raises:
        EmptyBatchError: If the batch is empty.
    """
    if not batch:
        raise EmptyBatchError("cannot score an empty batch")
    x, y, z = observations_to_arrays(list(batch))
    q = float(np.mean((predict_batch(model, x, z) - y) ** 2))

    x_tilde = sample_dummy_batches(sampler, z, k, rng)
    q_tilde = np.mean((predict_batch(model, x_tilde, z) - y[None, :]) ** 2, axis=1)
    w = float(np.mean(fn(q, q_tilde)))
    # guard rounding of the mean past the bound
    w = min(max(w, -fn.magnitude), fn.magnitude)
    return BettingScore(w, q, float(np.mean(q_tilde)))
