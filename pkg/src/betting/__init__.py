"""Betting scores comparing original and dummy statistics."""

from .scores import BettingScore, ScoreFn, score
from .statistics import batch_mse, derandomized_score

__all__ = ["BettingScore", "ScoreFn", "batch_mse", "derandomized_score", "score"]
