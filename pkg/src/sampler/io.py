"""
Versioned sampler files.

A sampler file is a JSON document {"format_version", "kind", "params"}.
"""

import json
from pathlib import Path
from typing import Any, Union

import structlog

from ..core.errors import SamplerFileError
from .base import DummySampler
from .gaussian import FittedGaussianSampler, GaussianLinearSampler
from .logistic import BernoulliLogisticSampler

logger = structlog.get_logger(__name__)

SAMPLER_FORMAT_VERSION = 1

SAMPLER_KINDS: dict[str, Any] = {
    "gaussian_linear": GaussianLinearSampler,
    "fitted_gaussian": FittedGaussianSampler,
    "bernoulli_logistic": BernoulliLogisticSampler,
}


def sampler_kind(sampler: DummySampler) -> str:
    for kind, cls in SAMPLER_KINDS.items():
        if isinstance(sampler, cls):
            return kind
    raise SamplerFileError(f"no file format for sampler type {type(sampler).__name__}")


def sampler_to_document(sampler: DummySampler) -> dict[str, Any]:
    return {
        "format_version": SAMPLER_FORMAT_VERSION,
        "kind": sampler_kind(sampler),
        "params": sampler.to_dict(),
    }


def sampler_from_document(document: Any) -> DummySampler:
    """
    Rebuild a sampler from its document form.

    Raises:
        SamplerFileError: On an unknown version or kind, or invalid parameters.
    """
    if not isinstance(document, dict):
        raise SamplerFileError("sampler document must be a JSON object")
    version = document.get("format_version")
    if version != SAMPLER_FORMAT_VERSION:
        raise SamplerFileError(f"unsupported sampler format version {version!r}")
    kind = document.get("kind")
    if kind not in SAMPLER_KINDS:
        raise SamplerFileError(f"unknown sampler kind {kind!r}")
    try:
        sampler: DummySampler = SAMPLER_KINDS[kind].from_dict(document["params"])
        return sampler
    except (KeyError, TypeError, ValueError) as e:
        raise SamplerFileError(f"invalid {kind} parameters: {e!r}") from e


def save_sampler(path: Union[str, Path], sampler: DummySampler) -> None:
    """Write a sampler file."""
    document = sampler_to_document(sampler)
    Path(path).write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    logger.info("sampler_saved", path=str(path), kind=document["kind"], d=sampler.dim)


def load_sampler(path: Union[str, Path]) -> DummySampler:
    """
    Read a sampler file.

    Raises:
        SamplerFileError: If the file is not valid JSON or not a sampler document.
    """
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SamplerFileError(f"{path} is not valid JSON: {e.msg}") from e
    return sampler_from_document(document)
