"""
Timings of the inner loops: mixture bets, ladder updates and dummy scoring.
"""

import time
from collections.abc import Callable
from dataclasses import dataclass

from ..betting.scores import ScoreFn
from ..betting.statistics import derandomized_score
from ..core.config import ModelConfig
from ..core.rng import RngStream
from ..datagen.synthetic import Regime, SyntheticConfig, gen_dataset
from ..martingale.mixture import MixtureState, mixture_update
from ..model.ladder import ModelLadder, online_update, snapshot


@dataclass
class BenchResult:
    name: str
    iterations: int
    seconds: float

    @property
    def per_op_us(self) -> float:
        return 1e6 * self.seconds / self.iterations


def _time(name: str, iterations: int, body: Callable[[int], object]) -> BenchResult:
    start = time.perf_counter()
    for i in range(iterations):
        body(i)
    return BenchResult(name, iterations, time.perf_counter() - start)


def run_bench(
    iterations: int = 1000,
    d: int = 19,
    grid_size: int = 1000,
    k: int = 20,
    batch: int = 10,
    seed: int = 0,
) -> list[BenchResult]:
    """Time each inner loop over `iterations` calls."""
    rng = RngStream(seed)
    data = gen_dataset(
        SyntheticConfig(regime=Regime.NON_NULL, n=iterations + 40, d=d), rng.child(0)
    )
    observations = data.observations

    mixture = MixtureState.fresh(grid_size)
    bets = rng.child(1).uniform(-1.0, 1.0, size=iterations)

    ladder = ModelLadder.warm_start(observations[:20], ModelConfig(), max_batch=batch)
    stream = observations[20:]

    frozen = snapshot(ladder, 0)
    fn = ScoreFn()
    score_rng = rng.child(2)
    windows = [stream[i : i + batch] for i in range(0, len(stream) - batch, batch)] or [stream]

    return [
        _time(
            f"mixture_update (V={grid_size})",
            iterations,
            lambda i: mixture_update(mixture, float(bets[i])),
        ),
        _time(
            f"online_update (L={ladder.n_rungs}, p={d + 1})",
            iterations,
            lambda i: online_update(ladder, stream[i]),
        ),
        _time(
            f"derandomized_score (K={k}, b={batch})",
            iterations,
            lambda i: derandomized_score(
                frozen, windows[i % len(windows)], data.sampler, k, fn, score_rng.child(i)
            ),
        ),
        _time("snapshot", iterations, lambda i: snapshot(ladder, i)),
    ]

