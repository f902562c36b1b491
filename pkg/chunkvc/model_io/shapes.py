"""Config-derived table of every weight tensor the model reads."""

from __future__ import annotations

from typing import Literal

from chunkvc.config.schema import ModelConfig
from chunkvc.content import extractor as content
from chunkvc.decoder import acoustic as decoder
from chunkvc.style import encoder as style
from chunkvc.vocoder import shuffle as vocoder

TensorKind = Literal["weight", "bias", "gain", "codebook"]


def weight_table(cfg: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Ordered name → shape map: content, style, decoder, then vocoder tensors."""
    table: dict[str, tuple[int, ...]] = {}
    table.update(content.weight_shapes(cfg.extractor, cfg.mel))
    table.update(style.weight_shapes(cfg.style, cfg.mel, cfg.decoder))
    table.update(decoder.weight_shapes(cfg.decoder, cfg.style, cfg.extractor, cfg.mel))
    table.update(vocoder.weight_shapes(cfg.vocoder, cfg.mel))
    return table


def tensor_kind(name: str) -> TensorKind:
    if name == f"{style.PREFIX}.codebook":
        return "codebook"
    if name.endswith(".bias"):
        return "bias"
    if name.endswith(".gain"):
        return "gain"
    return "weight"


def fans(shape: tuple[int, ...]) -> tuple[int, int]:
    """(fan_in, fan_out) of a dense (out, in) or conv (out, in, kernel) weight."""
    if len(shape) == 3:
        out_channels, in_channels, kernel = shape
        return in_channels * kernel, out_channels * kernel
    if len(shape) == 2:
        return shape[1], shape[0]
    return shape[0], shape[0]
