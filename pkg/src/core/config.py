"""
Configuration management for ecrt-stream.

TestConfig and ModelConfig are validated Pydantic models loaded from JSON
documents. Process-level settings (logging, worker count, output directory)
come from environment variables via Pydantic settings.
"""

import hashlib
import json
from enum import Enum
from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import DomainError


class ScoreKind(str, Enum):
    """Betting-score function families."""

    SIGN = "sign"
    TANH = "tanh"


class TestConfig(BaseModel):
    """Parameters of one sequential test."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(default=0.05, description="Significance level")
    n_init: int = Field(default=20, description="Warm-up samples used to train the initial model")
    batch_sizes: tuple[int, ...] = Field(
        default=(2, 5, 10),
        description="Batch sizes of the ensemble martingale",
    )
    k_derandomize: int = Field(default=20, description="Dummy copies averaged per betting score")
    grid_size: int = Field(default=1000, description="Number of mixture grid points")
    score_kind: ScoreKind = Field(default=ScoreKind.SIGN, description="Betting-score function")
    score_magnitude: float = Field(default=1.0, description="Bound m on the betting score")
    seed: int = Field(default=0, description="Root seed of the test's RNG stream")

    @field_validator("alpha")
    @classmethod
    def alpha_in_unit_interval(cls, v: float) -> float:
        """Require 0 < alpha < 1."""
        if not 0.0 < v < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {v}")
        return v

    @field_validator("n_init", "k_derandomize")
    @classmethod
    def positive_int(cls, v: int) -> int:
        """Require a positive count."""
        if v < 1:
            raise ValueError(f"must be >= 1, got {v}")
        return v

    @field_validator("grid_size")
    @classmethod
    def grid_has_two_points(cls, v: int) -> int:
        """Require at least two grid points."""
        if v < 2:
            raise ValueError(f"grid_size must be >= 2, got {v}")
        return v

    @field_validator("score_magnitude")
    @classmethod
    def magnitude_in_range(cls, v: float) -> float:
        """Require 0 < m <= 1."""
        if not 0.0 < v <= 1.0:
            raise ValueError(f"score_magnitude must lie in (0, 1], got {v}")
        return v

    @field_validator("seed")
    @classmethod
    def seed_is_uint64(cls, v: int) -> int:
        """Require a 64-bit unsigned seed."""
        if not 0 <= v < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {v}")
        return v

    @field_validator("batch_sizes", mode="before")
    @classmethod
    def normalize_batch_sizes(cls, v: Union[int, list, tuple, set]) -> tuple[int, ...]:
        """Accept a scalar or any collection; require distinct positive sizes."""
        if isinstance(v, int):
            v = (v,)
        sizes = list(v)
        if not sizes:
            raise ValueError("batch_sizes must not be empty")
        if any(int(b) < 1 for b in sizes):
            raise ValueError(f"batch sizes must be >= 1, got {sizes}")
        if len(set(sizes)) != len(sizes):
            raise ValueError(f"batch sizes must be distinct, got {sizes}")
        return tuple(sorted(int(b) for b in sizes))

    @property
    def threshold(self) -> float:
        """Rejection threshold 1/alpha."""
        return ville_threshold(self.alpha)

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


class ModelConfig(BaseModel):
    """Online lasso ladder hyper-parameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_rungs: int = Field(default=20, ge=1, description="Number of eta values L")
    eta_min_factor: float = Field(default=1e-3, gt=0, description="Smallest eta / data scale")
    eta_max_factor: float = Field(default=1e1, gt=0, description="Largest eta / data scale")
    sweeps_per_step: int = Field(default=3, ge=1, description="CD sweeps per new observation")
    warmup_max_sweeps: int = Field(default=500, ge=1, description="Sweep cap for batch fits")
    warmup_tol: float = Field(default=1e-8, gt=0, description="Relative objective change to stop")
    min_holdout: int = Field(default=25, ge=1, description="Lower bound on the holdout length")
    holdout_per_batch: int = Field(default=5, ge=1, description="Holdout length per unit of b_max")
    window: Optional[int] = Field(default=None, ge=2, description="Bounded training window")
    standardize: bool = Field(default=False, description="Standardize features on warm-up data")

    @model_validator(mode="after")
    def grid_is_ordered(self) -> "ModelConfig":
        """Require eta_min_factor < eta_max_factor."""
        if self.eta_min_factor >= self.eta_max_factor and self.n_rungs > 1:
            raise ValueError("eta_min_factor must be below eta_max_factor")
        return self

    def holdout_len(self, max_batch: int) -> int:
        """Trailing holdout length for eta selection."""
        return max(self.min_holdout, self.holdout_per_batch * max_batch)


class Settings(BaseSettings):
    """
    Process-level settings.

    Environment variables:
        ECRT_LOG_LEVEL: Logging level (DEBUG, INFO, WARNING, ERROR)
        ECRT_LOG_FORMAT: "json" or "console"
        ECRT_PARALLELISM: Default number of trial workers
        ECRT_OUTPUT_DIR: Directory for reports and logs
    """

    model_config = SettingsConfigDict(
        env_prefix="ECRT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    log_level: str = Field(default="INFO", description="Logging level")
    log_format: str = Field(default="json", description="Log renderer: json or console")
    parallelism: int = Field(default=1, ge=1, description="Default number of trial workers")
    output_dir: Path = Field(default=Path("results"), description="Report output directory")

    @field_validator("log_level", mode="before")
    @classmethod
    def upper_level(cls, v: str) -> str:
        """Normalize the level name."""
        return str(v).upper()

    @field_validator("log_format")
    @classmethod
    def known_format(cls, v: str) -> str:
        """Only json and console renderers exist."""
        if v not in ("json", "console"):
            raise ValueError(f"log_format must be 'json' or 'console', got {v!r}")
        return v


def ville_threshold(alpha: float) -> float:
    """
    Wealth level at which the null is rejected.

    Raises:
        DomainError: If alpha is outside (0, 1).
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return 1.0 / alpha


def load_test_config(path: Union[str, Path]) -> TestConfig:
    """Load a TestConfig from a JSON document."""
    with open(path, encoding="utf-8") as fh:
        return TestConfig.model_validate(json.load(fh))


# Global settings instance (lazy-loaded)
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create the global settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings
