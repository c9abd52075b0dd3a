"""
Checkpoint blobs for resumable tests.

A blob is UTF-8 JSON:

    {"format": "ecrt-checkpoint", "version": 1, "config_hash": ...,
     "digest": sha256(canonical payload), "payload": TesterState.to_dict()}

Python's float repr round-trips exactly, so a restored tester continues
bit-for-bit.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Union

import structlog

from ..core.errors import CheckpointVersionError, CorruptCheckpointError
from .tester import TesterState

logger = structlog.get_logger(__name__)

CHECKPOINT_FORMAT = "ecrt-checkpoint"
CHECKPOINT_VERSION = 1


def _canonical(payload: dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def checkpoint(state: TesterState) -> bytes:
    """Serialise a tester state."""
    payload = state.to_dict()
    canonical = _canonical(payload)
    blob = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config_hash": state.config.config_hash(),
        "digest": hashlib.sha256(canonical.encode()).hexdigest(),
        "payload": payload,
    }
    return json.dumps(blob, sort_keys=True).encode("utf-8")


def restore(blob: Union[bytes, str]) -> TesterState:
    """
    Rebuild a tester state from a checkpoint blob.

    Raises:
        CorruptCheckpointError: If the blob is unparseable, fails its digest,
            or its config hash does not match the embedded config.
        CheckpointVersionError: If the blob was written by another format version.
    """
    try:
        text = blob.decode("utf-8") if isinstance(blob, bytes) else blob
        document = json.loads(text)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CorruptCheckpointError(f"checkpoint is not valid JSON: {e}") from e

    if not isinstance(document, dict) or document.get("format") != CHECKPOINT_FORMAT:
        raise CorruptCheckpointError("not an ecrt checkpoint")
    if document.get("version") != CHECKPOINT_VERSION:
        raise CheckpointVersionError(
            f"checkpoint version {document.get('version')!r}, expected {CHECKPOINT_VERSION}"
        )

    payload = document.get("payload")
    if not isinstance(payload, dict):
        raise CorruptCheckpointError("checkpoint has no payload")
    digest = hashlib.sha256(_canonical(payload).encode()).hexdigest()
    if digest != document.get("digest"):
        raise CorruptCheckpointError("checkpoint digest mismatch")

    try:
        state = TesterState.from_dict(payload)
    except (KeyError, TypeError, ValueError) as e:
        raise CorruptCheckpointError(f"checkpoint payload is malformed: {e!r}") from e
    if state.config.config_hash() != document.get("config_hash"):
        raise CorruptCheckpointError("checkpoint config hash does not match its config")
    return state


def save_checkpoint(path: Union[str, Path], state: TesterState) -> None:
    Path(path).write_bytes(checkpoint(state))
    logger.info("checkpoint_written", path=str(path), t=state.t, wealth=state.wealth)


def load_checkpoint(path: Union[str, Path]) -> TesterState:
    return restore(Path(path).read_bytes())
