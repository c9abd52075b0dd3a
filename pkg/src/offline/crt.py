"""
Offline conditional and holdout randomization tests.

Both compare a statistic on the data against M statistics on copies whose x
column is redrawn from the sampler, and report

    p = (1 + #{dummy statistic <= original}) / (1 + M),

which is super-uniform under the null for any fixed n. Dummy m draws from
rng.child(m), so results do not depend on evaluation order.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import structlog

from ..core.errors import DegenerateSplitError, DomainError
from ..core.rng import RngStream
from ..core.types import Observation, observations_to_arrays
from ..sampler.base import DummySampler, sample_dummy_batches
from .trainer import LassoCVTrainer, Trainer, holdout_mse

logger = structlog.get_logger(__name__)


@dataclass
class OfflineResult:
    """A randomization-test p-value with the statistics behind it."""

    p_value: float
    statistic: float
    dummy_statistics: list[float]

    @property
    def m(self) -> int:
        return len(self.dummy_statistics)


@dataclass
class PeekingResult:
    """CRT p-values recomputed on growing prefixes."""

    looks: list[int]
    p_values: list[float]
    first_rejection: Optional[int] = None
    running_min: list[float] = field(default_factory=list)

    @property
    def min_p_value(self) -> float:
        return min(self.p_values)

    @property
    def rejected(self) -> bool:
        return self.first_rejection is not None


def pvalue_from_statistics(statistic: float, dummy_statistics: Sequence[float]) -> OfflineResult:
    """
    Randomization p-value; smaller statistics are stronger evidence.

    Raises:
        DomainError: If no dummy statistics are given.
    """
    dummies = [float(s) for s in dummy_statistics]
    if not dummies:
        raise DomainError("need at least one dummy statistic")
    count = sum(1 for s in dummies if s <= statistic)
    return OfflineResult((1 + count) / (1 + len(dummies)), float(statistic), dummies)


def _check_counts(n: int, m: int) -> None:
    if n < 2:
        raise DomainError(f"need at least 2 observations, got {n}")
    if m < 1:
        raise DomainError(f"need at least one dummy copy, got m={m}")


def crt_pvalue(
    data: Sequence[Observation],
    trainer: Optional[Trainer],
    sampler: DummySampler,
    m: int,
    rng: RngStream,
) -> OfflineResult:
    """
    Conditional randomization test: refit the trainer on every dummy copy.

    Args:
        data: The n observations.
        trainer: Fitting procedure; cross-validated lasso when None.
        sampler: Conditional sampler for X given Z.
        m: Number of dummy copies M.
        rng: Random stream; dummy i uses rng.child(i).
    """
    trainer = trainer or LassoCVTrainer()
    _check_counts(len(data), m)
    x, y, z = observations_to_arrays(list(data))
    features = np.column_stack([x, z])
    statistic = trainer.statistic(features, y)

    dummies = []
    for i in range(m):
        features[:, 0] = sample_dummy_batches(sampler, z, 1, rng.child(i))[0]
        dummies.append(trainer.statistic(features, y))
    return pvalue_from_statistics(statistic, dummies)


def hrt_pvalue(
    data: Sequence[Observation],
    split_fraction: float,
    trainer: Optional[Trainer],
    sampler: DummySampler,
    m: int,
    rng: RngStream,
) -> OfflineResult:
    """
    Holdout randomization test: fit once on the leading split, resample x on
    the trailing split only.

    Raises:
        DegenerateSplitError: If either split would be empty.
    """
    trainer = trainer or LassoCVTrainer()
    _check_counts(len(data), m)
    if not 0.0 < split_fraction < 1.0:
        raise DegenerateSplitError(f"split_fraction must lie in (0, 1), got {split_fraction}")
    n_train = int(round(len(data) * split_fraction))
    if n_train < 1 or n_train >= len(data):
        raise DegenerateSplitError(
            f"split_fraction {split_fraction} leaves an empty side of {len(data)} rows"
        )

    x, y, z = observations_to_arrays(list(data))
    features = np.column_stack([x, z])
    model = trainer.fit(features[:n_train], y[:n_train])
    holdout_features = features[n_train:].copy()
    holdout_y = y[n_train:]
    statistic = holdout_mse(model, holdout_features, holdout_y)

    dummies = []
    for i in range(m):
        holdout_features[:, 0] = sample_dummy_batches(sampler, z[n_train:], 1, rng.child(i))[0]
        dummies.append(holdout_mse(model, holdout_features, holdout_y))
    return pvalue_from_statistics(statistic, dummies)


def peeking_min_pvalue(
    data: Sequence[Observation],
    looks: Sequence[int],
    trainer: Optional[Trainer],
    sampler: DummySampler,
    m: int,
    rng: RngStream,
    alpha: float = 0.05,
) -> PeekingResult:
    """
    Recompute the CRT p-value on growing prefixes and stop at the first p <= alpha.

    This is the invalid repeated-testing procedure that anytime-valid wealth
    avoids; it is kept as a negative control.
    """
    ordered = sorted(int(n) for n in looks)
    if not ordered or ordered[-1] > len(data):
        raise DomainError(f"looks must be non-empty and at most {len(data)}")
    result = PeekingResult(looks=[], p_values=[])
    current = float("inf")
    for k, n in enumerate(ordered):
        p = crt_pvalue(data[:n], trainer, sampler, m, rng.child(k)).p_value
        current = min(current, p)
        result.looks.append(n)
        result.p_values.append(p)
        result.running_min.append(current)
        if p <= alpha:
            result.first_rejection = n
            break
    return result
