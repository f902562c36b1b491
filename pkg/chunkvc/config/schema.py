"""Pydantic models for chunkvc configuration."""

from __future__ import annotations

from collections.abc import Callable
from typing import Literal, TypeVar, cast

from pydantic import BaseModel, ConfigDict, Field

T = TypeVar("T", bound=BaseModel)

LABEL_FRAME_MS = 20


def _model_factory(model: type[T]) -> Callable[[], T]:
    return cast(Callable[[], T], model)


class MelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sample_rate: int = Field(16000, ge=1)
    win: int = Field(1024, ge=1)
    hop: int = Field(320, ge=1)
    n_mels: int = Field(80, ge=1)
    f_min: float = Field(0.0, ge=0.0)
    f_max: float = Field(8000.0, gt=0.0)
    log_floor: float = Field(1e-5, gt=0.0)

    @property
    def frame_ms(self) -> float:
        return 1000.0 * self.hop / self.sample_rate


class ExtractorConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    layers: int = Field(6, ge=1)
    d_model: int = Field(256, ge=1)
    heads: int = Field(4, ge=1)
    ffn_dim: int = Field(1024, ge=1)
    chunk_frames: int = Field(4, ge=1)
    right_context_chunks: int = Field(2, ge=0)
    left_context_frames: int = Field(8, ge=0)
    memory_slots: int = Field(4, ge=0)
    classes: int = Field(100, ge=1)

    @property
    def right_context_frames(self) -> int:
        return self.right_context_chunks * self.chunk_frames


class StyleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    enabled: bool = True
    codebook_size: int = Field(128, ge=1)
    d_code: int = Field(64, ge=1)
    d_timbre: int = Field(128, ge=1)
    hidden: int = Field(128, ge=1)
    token_frames: int = Field(4, ge=1)
    timbre_layers: int = Field(4, ge=1)
    timbre_kernel: int = Field(3, ge=1)
    style_layers: int = Field(2, ge=1)
    style_kernel: int = Field(5, ge=1)
    d_attn: int = Field(64, ge=1)
    beta: float = Field(0.25, ge=0.0)
    codebook_init: float = Field(0.1, gt=0.0)


class DecoderConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    content_dim: int = Field(256, ge=1)
    pitch_emb_dim: int = Field(32, ge=1)
    pitch_hidden: int = Field(256, ge=1)
    pitch_kernel: int = Field(3, ge=1)
    pitch_dilations: list[int] = Field(default_factory=lambda: [1, 2, 4])
    hidden: int = Field(256, ge=1)
    kernel: int = Field(3, ge=1)
    dilations: list[int] = Field(default_factory=lambda: [1, 1, 2, 2, 4, 4])


class VocoderConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    base_channels: int = Field(128, ge=1)
    upsample_factors: list[int] = Field(default_factory=lambda: [8, 5, 4, 2])
    upsample_mode: Literal["shuffle", "zero_stuff"] = "shuffle"
    resblock_kernels: list[int] = Field(default_factory=lambda: [3, 7, 11])
    resblock_dilations: list[int] = Field(default_factory=lambda: [1, 3, 5])
    pre_kernel: int = Field(7, ge=1)
    stage_kernel: int = Field(7, ge=1)
    post_kernel: int = Field(7, ge=1)
    leaky_slope: float = Field(0.1, ge=0.0)


class SessionConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    setting: Literal["full", "fast"] = "full"
    chunk_ms: int = Field(80, ge=1)
    right_context_chunks: int = Field(2, ge=0)
    right_context_ms: float | None = Field(default=None, ge=0.0)
    pipeline_parallel: bool = False
    queue_size: int = Field(4, ge=1)

    @property
    def chunk_frames(self) -> int:
        return self.chunk_ms // LABEL_FRAME_MS

    @property
    def chunk_samples(self) -> int:
        return self.chunk_ms * 16

    @property
    def effective_right_context_ms(self) -> float:
        if self.right_context_ms is not None:
            return float(self.right_context_ms)
        return float(self.right_context_chunks * self.chunk_ms)


class LoggingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    format: Literal["console", "json"] = "console"
    file: str | None = None


class ObservabilityConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    logging: LoggingConfig = Field(default_factory=_model_factory(LoggingConfig))


class ModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    version: str = "1.0"
    mel: MelConfig = Field(default_factory=_model_factory(MelConfig))
    extractor: ExtractorConfig = Field(default_factory=_model_factory(ExtractorConfig))
    style: StyleConfig = Field(default_factory=_model_factory(StyleConfig))
    decoder: DecoderConfig = Field(default_factory=_model_factory(DecoderConfig))
    vocoder: VocoderConfig = Field(default_factory=_model_factory(VocoderConfig))
    session: SessionConfig = Field(default_factory=_model_factory(SessionConfig))
    observability: ObservabilityConfig = Field(
        default_factory=_model_factory(ObservabilityConfig)
    )
