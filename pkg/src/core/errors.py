"""
Exception hierarchy for ecrt-stream.

Every error raised on purpose by the package derives from ECRTError so the CLI
can map it to a single exit status. Errors describing bad values also derive
from ValueError.
"""

from typing import Optional


class ECRTError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(ECRTError, ValueError):
    """A vector does not have the configured dimension."""

    def __init__(self, expected: int, actual: int, what: str = "z"):
        super().__init__(f"{what} has length {actual}, expected {expected}")
        self.expected = expected
        self.actual = actual


class NonFiniteValueError(ECRTError, ValueError):
    """An input contains NaN or infinity."""


class DomainError(ECRTError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class EmptyBatchError(ECRTError, ValueError):
    """A statistic was requested on an empty batch."""


class EmptyHoldoutError(ECRTError, ValueError):
    """Model selection was requested before any holdout error was recorded."""


class InsufficientWarmupError(ECRTError, ValueError):
    """The stream ended before the warm-up samples were collected."""

    def __init__(self, required: int, received: int):
        super().__init__(f"warm-up needs {required} observations, stream supplied {received}")
        self.required = required
        self.received = received


class SingularCovarianceError(ECRTError, ValueError):
    """A covariance matrix could not be factorised even after regularisation."""


class DegenerateClassError(ECRTError, ValueError):
    """A binary column holds a single class."""


class DegenerateSplitError(ECRTError, ValueError):
    """A train/holdout split left one side empty."""


class TesterDecidedError(ECRTError):
    """A tester that already rejected was stepped again."""


class CheckpointError(ECRTError):
    """Base class for checkpoint failures."""


class CheckpointVersionError(CheckpointError):
    """The checkpoint was written by an incompatible format version."""


class CorruptCheckpointError(CheckpointError):
    """The checkpoint could not be parsed or failed its integrity check."""


class SamplerFileError(ECRTError):
    """A sampler file is malformed or of an unknown kind."""


class IngestionError(ECRTError):
    """A stream record could not be parsed or validated."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line_number = line_number


class TrialError(ECRTError):
    """A simulation trial failed; carries the trial index."""

    def __init__(self, trial_index: int, cause: BaseException):
        super().__init__(f"trial {trial_index} failed: {type(cause).__name__}: {cause}")
        self.trial_index = trial_index
        self.cause = cause


class ResponseLeakError(ECRTError, TypeError):
    """A sampler interface could receive response values."""
