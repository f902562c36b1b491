"""Per-stream state of the streaming content extractor."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from chunkvc.config.schema import ExtractorConfig
from chunkvc.kernels.types import DTYPE, Tensor2D

ContentLabels = npt.NDArray[np.int64]


def _empty(d_model: int) -> Tensor2D:
    return np.zeros((d_model, 0), dtype=DTYPE)


@dataclass(frozen=True)
class LayerCache:
    """Memory bank and left-context key/value cache of one layer.

    ``memory`` holds raw summary vectors (projected with W_k / W_v on use);
    ``left_keys`` / ``left_values`` hold already-projected frames.
    """

    memory: Tensor2D
    left_keys: Tensor2D
    left_values: Tensor2D

    @classmethod
    def empty(cls, d_model: int) -> LayerCache:
        return cls(memory=_empty(d_model), left_keys=_empty(d_model), left_values=_empty(d_model))


def config_fingerprint(cfg: ExtractorConfig) -> tuple[int, ...]:
    return (
        cfg.layers,
        cfg.d_model,
        cfg.heads,
        cfg.chunk_frames,
        cfg.right_context_chunks,
        cfg.left_context_frames,
        cfg.memory_slots,
        cfg.classes,
    )


@dataclass(frozen=True)
class ExtractorState:
    layers: tuple[LayerCache, ...]
    fingerprint: tuple[int, ...]
    chunk_index: int = 0
    finished: bool = False

    @property
    def memory_sizes(self) -> list[int]:
        return [cache.memory.shape[1] for cache in self.layers]


def new_state(cfg: ExtractorConfig) -> ExtractorState:
    """Empty memory banks and caches, chunk index 0."""
    return ExtractorState(
        layers=tuple(LayerCache.empty(cfg.d_model) for _ in range(cfg.layers)),
        fingerprint=config_fingerprint(cfg),
        chunk_index=0,
    )


def empty_labels() -> ContentLabels:
    return np.zeros(0, dtype=np.int64)


def keep_last(block: Tensor2D, frames: int) -> Tensor2D:
    if frames <= 0:
        return block[:, :0]
    return np.ascontiguousarray(block[:, max(0, block.shape[1] - frames) :])
