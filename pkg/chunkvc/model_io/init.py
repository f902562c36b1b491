"""Deterministic seeded weight initialisation."""

from __future__ import annotations

import hashlib
import math

import numpy as np
import numpy.typing as npt
import structlog

from chunkvc.config.loader import ConfigLoader
from chunkvc.config.schema import ModelConfig
from chunkvc.exceptions import ConfigError
from chunkvc.model_io.shapes import fans, tensor_kind, weight_table
from chunkvc.models import ModelWeights

logger = structlog.get_logger()


def tensor_stream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for one tensor, keyed by (seed, tensor name)."""
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]
    return np.random.default_rng(np.random.SeedSequence([seed, *words]))


def init_tensor(
    name: str, shape: tuple[int, ...], seed: int, codebook_range: float = 0.1
) -> npt.NDArray[np.float32]:
    kind = tensor_kind(name)
    if kind == "bias":
        return np.zeros(shape, dtype=np.float32)
    if kind == "gain":
        return np.ones(shape, dtype=np.float32)
    if kind == "codebook":
        bound = codebook_range
    else:
        fan_in, fan_out = fans(shape)
        bound = math.sqrt(6.0 / (fan_in + fan_out))
    values = tensor_stream(seed, name).uniform(-bound, bound, size=shape)
    return values.astype(np.float32)


def init_weights(cfg: ModelConfig, seed: int) -> ModelWeights:
    """Fill every tensor in :func:`weight_table` from its own seeded stream."""
    if seed < 0:
        raise ConfigError(f"seed must be non-negative, got {seed}")
    ConfigLoader().ensure_valid(cfg)
    tensors = {
        name: init_tensor(name, shape, seed, cfg.style.codebook_init)
        for name, shape in weight_table(cfg).items()
    }
    weights = ModelWeights(tensors)
    logger.info(
        "weights_initialized",
        seed=seed,
        tensors=len(weights),
        parameters=int(sum(t.size for t in tensors.values())),
    )
    return weights
