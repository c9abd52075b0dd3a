"""Offline fixed-n randomization tests."""

from .crt import (
    OfflineResult,
    PeekingResult,
    crt_pvalue,
    hrt_pvalue,
    peeking_min_pvalue,
    pvalue_from_statistics,
)
from .trainer import LassoCVTrainer, LeastSquaresTrainer, Trainer

__all__ = [
    "LassoCVTrainer",
    "LeastSquaresTrainer",
    "OfflineResult",
    "PeekingResult",
    "Trainer",
    "crt_pvalue",
    "hrt_pvalue",
    "peeking_min_pvalue",
    "pvalue_from_statistics",
]
