"""
Newline-delimited JSON record streams.

Each line is a flat object {"x": number, "y": number, "z": [d numbers]}.
Blank lines are skipped. Readers are lazy so a test can stop reading the moment
it rejects.
"""

import json
from collections.abc import Iterable, Iterator
from pathlib import Path
from typing import IO, Any, Optional, Union

import numpy as np
import structlog

from .errors import ECRTError, IngestionError
from .types import Observation, validate_observation

logger = structlog.get_logger(__name__)

PathOrFile = Union[str, Path, IO[str]]


def iter_lines(source: Iterable[str]) -> Iterator[tuple[int, dict[str, Any]]]:
    """Parse (line_number, record) pairs from text lines, numbering from 1."""
    for line_number, line in enumerate(source, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            record = json.loads(text)
        except json.JSONDecodeError as e:
            raise IngestionError(f"invalid JSON: {e.msg}", line_number) from e
        if not isinstance(record, dict):
            raise IngestionError("record must be a JSON object", line_number)
        yield line_number, record


def iter_records(source: PathOrFile) -> Iterator[tuple[int, dict[str, Any]]]:
    """
    Lazily read records from a path or an open text file.

    Yields:
        (line_number, record) pairs.

    Raises:
        IngestionError: On a line that is not a JSON object.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            yield from iter_lines(fh)
    else:
        yield from iter_lines(source)


def iter_observations(
    records: Iterable[tuple[int, dict[str, Any]]], d: Optional[int] = None
) -> Iterator[Observation]:
    """
    Validate records into Observations.

    When d is None the dimension is taken from the first record.

    Raises:
        IngestionError: Naming the offending line for any validation failure.
    """
    for line_number, record in records:
        if d is None:
            z = record.get("z")
            d = len(z) if isinstance(z, list) else 0
        try:
            yield validate_observation(record, d)
        except IngestionError as e:
            if e.line_number is not None:
                raise
            raise IngestionError(str(e), line_number) from e
        except ECRTError as e:
            raise IngestionError(str(e), line_number) from e


def read_unlabeled(source: PathOrFile, d: Optional[int] = None) -> np.ndarray:
    """
    Read (x, z) rows for sampler fitting; "y" is optional and ignored.

    Returns:
        Array of shape (n, d + 1) with x in column 0.
    """
    rows = []
    for line_number, record in iter_records(source):
        patched = dict(record)
        patched.setdefault("y", 0.0)
        obs = next(iter_observations([(line_number, patched)], d))
        d = obs.d
        rows.append(obs.features())
    logger.debug("unlabeled_data_read", rows=len(rows), d=d)
    if not rows:
        return np.empty((0, (d or 0) + 1))
    return np.vstack(rows)


def write_records(path: Union[str, Path], observations: Iterable[Observation]) -> int:
    """Write Observations as NDJSON; returns the number of lines written."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for obs in observations:
            fh.write(json.dumps(obs.to_record()) + "\n")
            count += 1
    return count
