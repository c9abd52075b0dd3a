"""Wealth processes and the sequential tester."""

from .checkpoint import checkpoint, load_checkpoint, restore, save_checkpoint
from .mixture import MixtureState, base_wealth, midpoint_grid, mixture_update
from .tester import (
    BatchTrack,
    SequentialTester,
    TesterState,
    decide,
    run_sequential,
    step,
)

__all__ = [
    "BatchTrack",
    "MixtureState",
    "SequentialTester",
    "TesterState",
    "base_wealth",
    "checkpoint",
    "decide",
    "load_checkpoint",
    "midpoint_grid",
    "mixture_update",
    "restore",
    "run_sequential",
    "save_checkpoint",
    "step",
]
