"""The loaded model: every component built over one shared weight map."""

from __future__ import annotations

import math
from dataclasses import dataclass

import structlog

from chunkvc.config.loader import ConfigLoader
from chunkvc.config.schema import ModelConfig
from chunkvc.content.extractor import StreamContentExtractor
from chunkvc.content.state import ContentLabels
from chunkvc.decoder.acoustic import AcousticDecoder, DecoderState, mel_specs, pitch_specs
from chunkvc.dsp.mel import mel_spectrogram
from chunkvc.dsp.wav import PcmAudio
from chunkvc.exceptions import ReferenceTooShortError, SampleRateError
from chunkvc.kernels.conv import receptive_field
from chunkvc.kernels.types import Tensor2D
from chunkvc.models import ModelWeights
from chunkvc.style.encoder import StyleEncoder, StyleTokens, TimbreEmbedding
from chunkvc.vocoder.shuffle import ShuffleVocoder, receptive_frames

logger = structlog.get_logger()

MIN_REFERENCE_TOKENS = 2


@dataclass(frozen=True)
class ReferenceContext:
    """Timbre and style tokens of the target speaker, computed once per session."""

    z_t: TimbreEmbedding
    tokens: StyleTokens
    frames: int


@dataclass(frozen=True)
class ReceptiveFields:
    """Receptive fields in mel frames, current frame included."""

    pitch: int
    mel_decoder: int
    vocoder: int

    @property
    def context_frames(self) -> int:
        """Past frames a chunk needs to be recomputed from scratch."""
        return (self.pitch - 1) + (self.mel_decoder - 1) + (self.vocoder - 1)


def receptive_fields(cfg: ModelConfig) -> ReceptiveFields:
    return ReceptiveFields(
        pitch=receptive_field(pitch_specs(cfg.decoder, cfg.style)),
        mel_decoder=receptive_field(mel_specs(cfg.decoder)),
        vocoder=receptive_frames(cfg.vocoder, cfg.mel),
    )


class ConversionModel:
    def __init__(self, cfg: ModelConfig, weights: ModelWeights) -> None:
        ConfigLoader().ensure_valid(cfg)
        self.cfg = cfg
        self.weights = weights
        self.extractor = StreamContentExtractor(cfg.extractor, cfg.mel, weights)
        self.style = StyleEncoder(cfg.style, cfg.mel, cfg.decoder, weights)
        self.decoder = AcousticDecoder(cfg.decoder, cfg.style, cfg.extractor, cfg.mel, weights)
        self.vocoder = ShuffleVocoder(cfg.vocoder, cfg.mel, weights)

    def with_config(self, cfg: ModelConfig) -> ConversionModel:
        """Same weights under another streaming schedule."""
        return ConversionModel(cfg, self.weights)

    def prepare_reference(self, reference: PcmAudio) -> ReferenceContext:
        if reference.sample_rate != self.cfg.mel.sample_rate:
            raise SampleRateError(
                f"reference is {reference.sample_rate} Hz, expected {self.cfg.mel.sample_rate}"
            )
        m_rf = mel_spectrogram(reference, self.cfg.mel)
        frames = m_rf.shape[1]
        needed = MIN_REFERENCE_TOKENS * self.cfg.style.token_frames
        if frames < needed:
            raise ReferenceTooShortError(
                f"reference has {frames} frames ({reference.duration_ms:.0f} ms); "
                f"{needed} frames are needed for {MIN_REFERENCE_TOKENS} style tokens"
            )
        context = ReferenceContext(
            z_t=self.style.encode_timbre(m_rf),
            tokens=self.style.encode_style_tokens(m_rf),
            frames=frames,
        )
        logger.info(
            "reference_prepared",
            frames=frames,
            tokens=len(context.tokens),
            expected_tokens=math.ceil(frames / self.cfg.style.token_frames),
        )
        return context

    def main_stage(
        self, labels: ContentLabels, reference: ReferenceContext, state: DecoderState
    ) -> tuple[Tensor2D, DecoderState]:
        """Embedding, style alignment, pitch and mel decoding for one chunk."""
        content_emb = self.decoder.embed(labels)
        z_s = self.style.align_style(content_emb, reference.z_t, reference.tokens)
        mel, _, state = self.decoder.decode(content_emb, reference.z_t, z_s, state)
        return mel, state
