"""
Experiment orchestration.

An ExperimentSpec names a scenario, the number of trials, the horizon and the
base configurations. Each trial generates its own dataset and runs the
sequential test (plus the peeking baseline where the scenario asks for it).
Trial i always uses RngStream(seed, stream_id=i), so results do not depend on
the number of workers, and sweep values share datasets trial by trial.
"""

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Union

import anyio
import anyio.to_process
import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.config import ModelConfig, TestConfig, get_settings
from ..core.errors import TrialError
from ..core.log import configure_logging
from ..core.rng import RngStream
from ..datagen.synthetic import Regime, SyntheticConfig, gen_dataset, misspecified_sampler
from ..martingale.tester import run_sequential
from ..offline.crt import peeking_min_pvalue
from ..offline.trainer import LeastSquaresTrainer
from .metrics import MetricsTable, TrialResult, aggregate

logger = structlog.get_logger(__name__)


class Scenario(str, Enum):
    TYPE1 = "type1"
    POWER = "power"
    STOPPING_HIST = "stopping_hist"
    ABLATE_K = "ablate_k"
    ABLATE_BATCHES = "ablate_batches"
    DIM_SWEEP = "dim_sweep"
    RHO_SWEEP = "rho_sweep"
    MISSPEC_SWEEP = "misspec_sweep"
    PEEKING_HAZARD = "peeking_hazard"


# regime each scenario runs under; None keeps the configured one
SCENARIO_REGIME: dict[Scenario, Optional[Regime]] = {
    Scenario.TYPE1: Regime.NULL,
    Scenario.POWER: Regime.NON_NULL,
    Scenario.STOPPING_HIST: Regime.NON_NULL,
    Scenario.ABLATE_K: Regime.NON_NULL,
    Scenario.ABLATE_BATCHES: Regime.NON_NULL,
    Scenario.DIM_SWEEP: None,
    Scenario.RHO_SWEEP: None,
    Scenario.MISSPEC_SWEEP: Regime.NULL,
    Scenario.PEEKING_HAZARD: Regime.NULL,
}

DEFAULT_VALUES: dict[Scenario, list[Any]] = {
    Scenario.ABLATE_K: [1, 20],
    Scenario.ABLATE_BATCHES: [[2], [5], [10], [2, 5, 10]],
    Scenario.DIM_SWEEP: [5, 19, 50],
    Scenario.RHO_SWEEP: [0.0, 0.25, 0.5, 0.75],
    Scenario.MISSPEC_SWEEP: [0.1, 0.5, 1.0, 2.0, 3.0],
}


class ExperimentSpec(BaseModel):
    """One simulation study."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: Scenario
    trials: int = Field(default=200, ge=1, description="Number of independent trials R")
    horizon: int = Field(default=1000, ge=1, description="Test-clock steps per trial")
    checkpoints: tuple[int, ...] = Field(default=(), description="t values reported")
    checkpoint_every: int = Field(default=100, ge=1, description="Grid used when none given")
    test: TestConfig = Field(default_factory=TestConfig)
    data: SyntheticConfig = Field(default_factory=SyntheticConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    values: tuple[Any, ...] = Field(default=(), description="Swept parameter values")
    parallelism: Optional[int] = Field(default=None, ge=1, description="Worker processes")
    seed: int = Field(default=0, ge=0, description="Root seed of all trials")
    offline_m: int = Field(default=100, ge=1, description="Dummy copies for offline baselines")
    peek_every: int = Field(default=50, ge=1, description="Samples between peeking looks")
    hist_bins: int = Field(default=20, ge=1, description="Stop-time histogram bins")

    @field_validator("checkpoints", mode="before")
    @classmethod
    def sorted_checkpoints(cls, v: Any) -> tuple[int, ...]:
        return tuple(sorted(int(t) for t in v))

    @model_validator(mode="after")
    def checkpoints_within_horizon(self) -> "ExperimentSpec":
        if any(t < 1 or t > self.horizon for t in self.checkpoints):
            raise ValueError(f"checkpoints must lie in [1, {self.horizon}]")
        return self

    @property
    def checkpoint_grid(self) -> tuple[int, ...]:
        if self.checkpoints:
            return self.checkpoints
        grid = list(range(self.checkpoint_every, self.horizon + 1, self.checkpoint_every))
        if not grid or grid[-1] != self.horizon:
            grid.append(self.horizon)
        return tuple(grid)

    @property
    def sweep_values(self) -> tuple[Any, ...]:
        if self.values:
            return self.values
        return tuple(DEFAULT_VALUES.get(self.scenario, [None]))

    def config_hash(self) -> str:
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def load_experiment_spec(path: Union[str, Path]) -> ExperimentSpec:
    """Load an ExperimentSpec from a JSON document."""
    with open(path, encoding="utf-8") as fh:
        return ExperimentSpec.model_validate(json.load(fh))


def parameter_label(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return "{" + ",".join(str(v) for v in value) + "}"
    return str(value)


def variant(spec: ExperimentSpec, value: Any) -> tuple[TestConfig, SyntheticConfig]:
    """Test and data configs for one swept value."""
    test, data = spec.test, spec.data
    regime = SCENARIO_REGIME[spec.scenario] or data.regime
    data_updates: dict[str, Any] = {"regime": regime, "n": test.n_init + spec.horizon}
    test_updates: dict[str, Any] = {}
    if spec.scenario == Scenario.ABLATE_K:
        test_updates["k_derandomize"] = int(value)
    elif spec.scenario == Scenario.ABLATE_BATCHES:
        test_updates["batch_sizes"] = value
    elif spec.scenario == Scenario.DIM_SWEEP:
        data_updates["d"] = int(value)
    elif spec.scenario == Scenario.RHO_SWEEP:
        data_updates["rho"] = float(value)
    elif spec.scenario == Scenario.MISSPEC_SWEEP:
        data_updates["sigma_tilde"] = float(value)
    new_test = TestConfig.model_validate({**test.model_dump(), **test_updates})
    new_data = SyntheticConfig.model_validate({**data.model_dump(), **data_updates})
    return new_test, new_data


@dataclass
class TrialTask:
    """Everything a worker needs for one trial; picklable."""

    index: int
    parameter: str
    seed: int
    test: TestConfig
    data: SyntheticConfig
    model: ModelConfig
    checkpoints: tuple[int, ...]
    peeking: bool = False
    offline_m: int = 100
    peek_every: int = 50
    log_level: str = "WARNING"


def build_tasks(spec: ExperimentSpec, log_level: str = "WARNING") -> list[TrialTask]:
    tasks = []
    for value in spec.sweep_values:
        test, data = variant(spec, value)
        for i in range(spec.trials):
            tasks.append(
                TrialTask(
                    index=i,
                    parameter=parameter_label(value),
                    seed=spec.seed,
                    test=test,
                    data=data,
                    model=spec.model,
                    checkpoints=spec.checkpoint_grid,
                    peeking=spec.scenario == Scenario.PEEKING_HAZARD,
                    offline_m=spec.offline_m,
                    peek_every=spec.peek_every,
                    log_level=log_level,
                )
            )
    return tasks


def run_trial(task: TrialTask) -> TrialResult:
    """Generate one dataset and test it."""
    rng = RngStream(task.seed, stream_id=task.index)
    dataset = gen_dataset(task.data, rng.child(0))
    sampler = dataset.sampler
    if task.data.sigma_tilde != 1.0:
        sampler = misspecified_sampler(sampler, task.data.sigma_tilde)

    outcome = run_sequential(dataset.observations, task.test, sampler, rng.child(1), task.model)
    rejected_by = [outcome.rejected and outcome.stop_time <= t for t in task.checkpoints]
    result = TrialResult(
        index=task.index,
        parameter=task.parameter,
        rejected_by=rejected_by,
        wealth_at=[outcome.wealth_at(t) for t in task.checkpoints],
        stop_time=outcome.stop_time if outcome.rejected else None,
        final_wealth=outcome.final_wealth,
    )

    if task.peeking:
        n = len(dataset.observations)
        looks = list(range(task.peek_every, n + 1, task.peek_every))
        peek = peeking_min_pvalue(
            dataset.observations,
            looks,
            LeastSquaresTrainer(),
            sampler,
            task.offline_m,
            rng.child(2),
            alpha=task.test.alpha,
        )
        result.baseline_ran = True
        result.baseline_first_rejection = peek.first_rejection
    return result


_worker_logging_ready = False


def run_trial_in_worker(task: TrialTask) -> TrialResult:
    """Process-pool entry point; configures logging once per worker."""
    global _worker_logging_ready
    if not _worker_logging_ready:
        configure_logging(task.log_level, get_settings().log_format)
        _worker_logging_ready = True
    return run_trial(task)


def _aggregate(spec: ExperimentSpec, results: list[TrialResult]) -> MetricsTable:
    return aggregate(
        results,
        spec.checkpoint_grid,
        spec.scenario.value,
        spec.config_hash(),
        spec.seed,
        hist_bins=spec.hist_bins if spec.scenario == Scenario.STOPPING_HIST else 0,
        horizon=spec.horizon,
        warmup=spec.test.n_init,
    )


async def run_experiment_async(
    spec: ExperimentSpec, parallelism: Optional[int] = None
) -> MetricsTable:
    """
    Run all trials on a bounded process pool and aggregate.

    Raises:
        TrialError: For the lowest-index failed trial; remaining trials are cancelled.
    """
    workers = parallelism or spec.parallelism or get_settings().parallelism
    tasks = build_tasks(spec, get_settings().log_level)
    logger.info(
        "experiment_started",
        scenario=spec.scenario.value,
        trials=spec.trials,
        variants=len(spec.sweep_values),
        parallelism=workers,
    )
    if workers == 1:
        results = [_run_inline(task) for task in tasks]
    else:
        results = await _run_pool(tasks, workers)

    table = _aggregate(spec, results)
    logger.info("experiment_finished", scenario=spec.scenario.value, rows=len(table.rows))
    return table


def _run_inline(task: TrialTask) -> TrialResult:
    try:
        result = run_trial(task)
    except Exception as e:
        raise TrialError(task.index, e) from e
    logger.debug("trial_completed", trial=task.index, parameter=task.parameter)
    return result


async def _run_pool(tasks: list[TrialTask], workers: int) -> list[TrialResult]:
    limiter = anyio.CapacityLimiter(workers)
    results: list[Optional[TrialResult]] = [None] * len(tasks)
    failures: list[tuple[int, TrialError]] = []

    async with anyio.create_task_group() as tg:

        async def worker(position: int, task: TrialTask) -> None:
            try:
                results[position] = await anyio.to_process.run_sync(
                    run_trial_in_worker, task, limiter=limiter
                )
            except Exception as e:
                failures.append((task.index, TrialError(task.index, e)))
                tg.cancel_scope.cancel()
                return
            logger.debug("trial_completed", trial=task.index, parameter=task.parameter)

        for position, task in enumerate(tasks):
            tg.start_soon(worker, position, task)

    if failures:
        _, error = min(failures, key=lambda item: item[0])
        raise error from error.cause
    return [result for result in results if result is not None]


def run_experiment(spec: ExperimentSpec, parallelism: Optional[int] = None) -> MetricsTable:
    """Synchronous wrapper around run_experiment_async."""
    return anyio.run(run_experiment_async, spec, parallelism)
