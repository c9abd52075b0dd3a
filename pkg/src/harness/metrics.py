"""
Aggregation of trial results into a metrics table.

Metric floats are rounded to 6 significant digits when the table is built, so
a table survives a report round trip unchanged.
"""

from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

SIGNIFICANT_DIGITS = 6


def round_sig(value: float) -> float:
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


@dataclass
class TrialResult:
    """Per-trial record, one entry per checkpoint."""

    index: int
    parameter: str
    rejected_by: list[bool]
    wealth_at: list[float]
    stop_time: Optional[int]
    final_wealth: float
    baseline_first_rejection: Optional[int] = None
    baseline_ran: bool = False


@dataclass
class MetricsRow:
    parameter: str
    t: int
    trials: int
    rejection_rate: float
    mean_wealth: float
    stop_q10: Optional[float]
    stop_q50: Optional[float]
    stop_q90: Optional[float]
    baseline_rejection_rate: Optional[float] = None


@dataclass
class HistogramBin:
    parameter: str
    lower: float
    upper: float
    count: int


@dataclass
class MetricsTable:
    """Rows keyed by (parameter, checkpoint t)."""

    scenario: str
    config_hash: str
    seed: int
    rows: list[MetricsRow] = field(default_factory=list)
    histogram: list[HistogramBin] = field(default_factory=list)

    def row(self, parameter: str, t: int) -> MetricsRow:
        for row in self.rows:
            if row.parameter == parameter and row.t == t:
                return row
        raise KeyError((parameter, t))

    def series(self, parameter: str, column: str) -> list[Any]:
        return [getattr(row, column) for row in self.rows if row.parameter == parameter]


def _quantiles(stops: Sequence[int]) -> tuple[Optional[float], ...]:
    if not stops:
        return None, None, None
    q10, q50, q90 = np.quantile(np.asarray(stops, dtype=float), [0.1, 0.5, 0.9])
    return round_sig(float(q10)), round_sig(float(q50)), round_sig(float(q90))


def aggregate(
    results: Sequence[TrialResult],
    checkpoints: Sequence[int],
    scenario: str,
    config_hash: str,
    seed: int,
    hist_bins: int = 0,
    horizon: Optional[int] = None,
    warmup: int = 0,
) -> MetricsTable:
    """
    Summarise trials per parameter value and checkpoint.

    Counts and sums only, so the table does not depend on completion order.
    """
    grouped: dict[str, list[TrialResult]] = defaultdict(list)
    for result in sorted(results, key=lambda r: r.index):
        grouped[result.parameter].append(result)

    table = MetricsTable(scenario=scenario, config_hash=config_hash, seed=seed)
    for parameter, trials in grouped.items():
        for i, t in enumerate(checkpoints):
            rejected = [r.rejected_by[i] for r in trials]
            stops = [r.stop_time for r in trials if r.stop_time is not None and r.stop_time <= t]
            q10, q50, q90 = _quantiles(stops)
            baseline = None
            ran = [r for r in trials if r.baseline_ran]
            if ran:
                hits = sum(
                    1
                    for r in ran
                    if r.baseline_first_rejection is not None
                    and r.baseline_first_rejection <= warmup + t
                )
                baseline = round_sig(hits / len(ran))
            table.rows.append(
                MetricsRow(
                    parameter=parameter,
                    t=int(t),
                    trials=len(trials),
                    rejection_rate=round_sig(sum(rejected) / len(trials)),
                    mean_wealth=round_sig(float(np.mean([r.wealth_at[i] for r in trials]))),
                    stop_q10=q10,
                    stop_q50=q50,
                    stop_q90=q90,
                    baseline_rejection_rate=baseline,
                )
            )

        if hist_bins > 0 and horizon is not None:
            stops = [r.stop_time for r in trials if r.stop_time is not None]
            counts, edges = np.histogram(stops, bins=hist_bins, range=(0, horizon))
            table.histogram.extend(
                HistogramBin(parameter, round_sig(float(lo)), round_sig(float(hi)), int(c))
                for lo, hi, c in zip(edges[:-1], edges[1:], counts)
            )
    return table
