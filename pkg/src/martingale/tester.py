"""
The streaming e-CRT sequential test.

After a warm-up that trains the model ladder, each observation is appended to
one pending batch per batch size b. When a batch fills, it is scored against K
dummy copies with the model frozen before the batch began, the bet updates that
track's mixture wealth, and the track refreezes from the ladder once the ladder
has absorbed the observation. The reported wealth is the average over batch
sizes; the test rejects once it reaches 1/alpha.
"""

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from itertools import islice
from typing import Any, Optional

import numpy as np
import structlog

from ..betting.scores import ScoreFn
from ..betting.statistics import derandomized_score
from ..core.config import ModelConfig, TestConfig, ville_threshold
from ..core.errors import DomainError, InsufficientWarmupError, TesterDecidedError
from ..core.rng import RngStream
from ..core.types import Decision, Observation, TestOutcome, validate_observation
from ..model.ladder import ModelLadder, ModelSnapshot, online_update, snapshot
from ..sampler.base import DummySampler
from .mixture import MixtureState, base_wealth, mixture_update

logger = structlog.get_logger(__name__)

StepObserver = Callable[[int, float, Decision], None]


@dataclass
class BatchTrack:
    """Martingale for one batch size."""

    b: int
    mixture: MixtureState
    frozen_model: ModelSnapshot
    pending: list[Observation] = field(default_factory=list)

    @property
    def wealth(self) -> float:
        return self.mixture.wealth

    def to_dict(self) -> dict[str, Any]:
        return {
            "b": self.b,
            "mixture": self.mixture.to_dict(),
            "frozen_model": self.frozen_model.to_dict(),
            "pending": [obs.to_record() for obs in self.pending],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BatchTrack":
        pending = [validate_observation(r, len(r["z"])) for r in data["pending"]]
        return cls(
            b=int(data["b"]),
            mixture=MixtureState.from_dict(data["mixture"]),
            frozen_model=ModelSnapshot.from_dict(data["frozen_model"]),
            pending=pending,
        )


@dataclass
class TesterState:
    """Everything needed to continue a test, RNG position included."""

    config: TestConfig
    model_config: ModelConfig
    tracks: dict[int, BatchTrack]
    ladder: ModelLadder
    rng: RngStream
    t: int = 0
    wealth: float = 1.0
    decided: bool = False
    warmup: int = 0
    trajectory: list[tuple[int, float]] = field(default_factory=lambda: [(0, 1.0)])
    base_values: tuple[float, ...] = ()

    @classmethod
    def initialize(
        cls,
        warmup: Sequence[Observation],
        config: TestConfig,
        rng: Optional[RngStream] = None,
        model_config: Optional[ModelConfig] = None,
        base_values: Sequence[float] = (),
    ) -> "TesterState":
        """
        Train the ladder on the warm-up samples and open one track per batch size.

        Raises:
            InsufficientWarmupError: If fewer than n_init warm-up samples are given.
        """
        if len(warmup) < config.n_init:
            raise InsufficientWarmupError(config.n_init, len(warmup))
        for v in base_values:
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"base martingale fraction must lie in [0, 1], got {v}")
        model_config = model_config or ModelConfig()
        ladder = ModelLadder.warm_start(
            list(warmup[: config.n_init]), model_config, max(config.batch_sizes)
        )
        initial = snapshot(ladder, 0)
        tracks = {
            b: BatchTrack(b, MixtureState.fresh(config.grid_size), initial)
            for b in config.batch_sizes
        }
        return cls(
            config=config,
            model_config=model_config,
            tracks=tracks,
            ladder=ladder,
            rng=rng if rng is not None else RngStream(config.seed),
            warmup=config.n_init,
            base_values=tuple(float(v) for v in base_values),
        )

    def ensemble_wealth(self) -> float:
        return float(np.mean([track.wealth for track in self.tracks.values()]))

    def base_wealth(self, v: float) -> float:
        """Batch-size average of the base martingale at fraction v."""
        return float(np.mean([base_wealth(track.mixture, v) for track in self.tracks.values()]))

    def outcome(self) -> TestOutcome:
        return TestOutcome(
            decision=Decision.REJECTED if self.decided else Decision.NOT_REJECTED,
            stop_time=self.t,
            final_wealth=self.wealth,
            trajectory=list(self.trajectory),
            warmup=self.warmup,
            batch_wealth={b: track.wealth for b, track in self.tracks.items()},
            base_wealth={v: self.base_wealth(v) for v in self.base_values},
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.model_dump(mode="json"),
            "model_config": self.model_config.model_dump(mode="json"),
            "tracks": [track.to_dict() for track in self.tracks.values()],
            "ladder": self.ladder.to_dict(),
            "rng": self.rng.get_state(),
            "t": self.t,
            "wealth": self.wealth,
            "decided": self.decided,
            "warmup": self.warmup,
            "trajectory": [[t, s] for t, s in self.trajectory],
            "base_values": list(self.base_values),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TesterState":
        tracks = [BatchTrack.from_dict(item) for item in data["tracks"]]
        return cls(
            config=TestConfig.model_validate(data["config"]),
            model_config=ModelConfig.model_validate(data["model_config"]),
            tracks={track.b: track for track in tracks},
            ladder=ModelLadder.from_dict(data["ladder"]),
            rng=RngStream.from_state(data["rng"]),
            t=int(data["t"]),
            wealth=float(data["wealth"]),
            decided=bool(data["decided"]),
            warmup=int(data["warmup"]),
            trajectory=[(int(t), float(s)) for t, s in data["trajectory"]],
            base_values=tuple(float(v) for v in data["base_values"]),
        )


def decide(wealth: float, alpha: float) -> Decision:
    """Reject once wealth reaches 1/alpha."""
    if wealth < 0:
        raise DomainError(f"wealth must be non-negative, got {wealth}")
    return Decision.REJECTED if wealth >= ville_threshold(alpha) else Decision.CONTINUE


def step(
    state: TesterState,
    obs: Observation,
    sampler: DummySampler,
    rng: Optional[RngStream] = None,
) -> tuple[TesterState, float, Decision]:
    """
    Advance the test clock by one observation.

    Dummy draws for batch i of size b come from rng.child(b).child(i), so the
    result does not depend on the order tracks are processed in.

    Raises:
        TesterDecidedError: If the test already rejected.
    """
    if state.decided:
        raise TesterDecidedError(f"test already rejected at t={state.t}")
    rng = rng if rng is not None else state.rng
    config = state.config
    fn = ScoreFn.from_config(config)

    state.t += 1
    completed = []
    for b, track in state.tracks.items():
        track.pending.append(obs)
        if len(track.pending) < b:
            continue
        batch_rng = rng.child(b).child(state.t // b)
        bet = derandomized_score(
            track.frozen_model, track.pending, sampler, config.k_derandomize, fn, batch_rng
        )
        mixture_update(track.mixture, bet)
        track.pending = []
        completed.append(b)

    if completed:
        state.wealth = state.ensemble_wealth()
    state.trajectory.append((state.t, state.wealth))

    decision = decide(state.wealth, config.alpha)
    if decision == Decision.REJECTED:
        state.decided = True
        logger.debug("null_rejected", t=state.t, wealth=state.wealth)
        return state, state.wealth, decision

    online_update(state.ladder, obs, state.model_config.sweeps_per_step)
    for b in completed:
        state.tracks[b].frozen_model = snapshot(state.ladder, state.t)
    return state, state.wealth, decision


class SequentialTester:
    """A TesterState bound to its sampler."""

    def __init__(self, state: TesterState, sampler: DummySampler):
        self.state = state
        self.sampler = sampler

    @classmethod
    def start(
        cls,
        warmup: Sequence[Observation],
        config: TestConfig,
        sampler: DummySampler,
        rng: Optional[RngStream] = None,
        model_config: Optional[ModelConfig] = None,
        base_values: Sequence[float] = (),
    ) -> "SequentialTester":
        state = TesterState.initialize(warmup, config, rng, model_config, base_values)
        return cls(state, sampler)

    @property
    def decided(self) -> bool:
        return self.state.decided

    @property
    def wealth(self) -> float:
        return self.state.wealth

    def step(self, obs: Observation) -> tuple[float, Decision]:
        _, wealth, decision = step(self.state, obs, self.sampler)
        return wealth, decision

    def outcome(self) -> TestOutcome:
        return self.state.outcome()


def run_sequential(
    stream: Iterable[Observation],
    config: TestConfig,
    sampler: DummySampler,
    rng: Optional[RngStream] = None,
    model_config: Optional[ModelConfig] = None,
    observer: Optional[StepObserver] = None,
    base_values: Sequence[float] = (),
) -> TestOutcome:
    """
    Run the test over a stream until rejection or exhaustion.

    The first n_init observations train the model. Nothing is read from the
    stream after a rejection.

    Args:
        stream: Observations, consumed lazily.
        config: Test parameters.
        sampler: Conditional sampler for X given Z.
        rng: Random stream; defaults to one seeded from config.seed.
        model_config: Online model parameters.
        observer: Called with (t, wealth, decision) after every step.
        base_values: Fixed betting fractions whose base martingales are reported.

    Raises:
        InsufficientWarmupError: If the stream ends during the warm-up.
    """
    iterator = iter(stream)
    warmup = list(islice(iterator, config.n_init))
    if len(warmup) < config.n_init:
        raise InsufficientWarmupError(config.n_init, len(warmup))

    tester = SequentialTester.start(warmup, config, sampler, rng, model_config, base_values)
    for obs in iterator:
        wealth, decision = tester.step(obs)
        if observer is not None:
            observer(tester.state.t, wealth, decision)
        if decision == Decision.REJECTED:
            break

    outcome = tester.outcome()
    logger.debug(
        "sequential_test_finished",
        decision=outcome.decision.value,
        stop_time=outcome.stop_time,
        wealth=outcome.final_wealth,
    )
    return outcome
