"""Causal pitch predictor and gated causal mel decoder."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import numpy.typing as npt
import structlog

from chunkvc.config.schema import DecoderConfig, ExtractorConfig, MelConfig, StyleConfig
from chunkvc.content.state import ContentLabels
from chunkvc.exceptions import ShapeError
from chunkvc.kernels.conv import causal_conv1d
from chunkvc.kernels.ops import gated, leaky_relu, linear
from chunkvc.kernels.types import DTYPE, ConvSpec, ConvState, Tensor2D
from chunkvc.models import ModelWeights

logger = structlog.get_logger()

PREFIX = "decoder"
LEAKY_SLOPE = 0.1

PitchTrack = npt.NDArray[np.float32]


def pitch_specs(cfg: DecoderConfig, style: StyleConfig) -> list[ConvSpec]:
    first = cfg.content_dim + style.d_timbre + style.d_code
    return [
        ConvSpec(first if i == 0 else cfg.pitch_hidden, cfg.pitch_hidden, cfg.pitch_kernel, d)
        for i, d in enumerate(cfg.pitch_dilations)
    ]


def mel_specs(cfg: DecoderConfig) -> list[ConvSpec]:
    return [ConvSpec(cfg.hidden, 2 * cfg.hidden, cfg.kernel, d) for d in cfg.dilations]


def fused_dim(cfg: DecoderConfig, style: StyleConfig) -> int:
    return cfg.content_dim + style.d_timbre + style.d_code + cfg.pitch_emb_dim


def weight_shapes(
    cfg: DecoderConfig, style: StyleConfig, extractor: ExtractorConfig, mel: MelConfig
) -> dict[str, tuple[int, ...]]:
    shapes: dict[str, tuple[int, ...]] = {
        f"{PREFIX}.embedding": (extractor.classes, cfg.content_dim),
    }
    for i, spec in enumerate(pitch_specs(cfg, style)):
        shapes[f"{PREFIX}.pitch.convs.{i}.weight"] = spec.weight_shape
        shapes[f"{PREFIX}.pitch.convs.{i}.bias"] = (spec.out_channels,)
    shapes[f"{PREFIX}.pitch.proj.weight"] = (1, cfg.pitch_hidden)
    shapes[f"{PREFIX}.pitch.proj.bias"] = (1,)
    shapes[f"{PREFIX}.pitch_embed.weight"] = (cfg.pitch_emb_dim, 1)
    shapes[f"{PREFIX}.pitch_embed.bias"] = (cfg.pitch_emb_dim,)
    shapes[f"{PREFIX}.mel.input.weight"] = (cfg.hidden, fused_dim(cfg, style))
    shapes[f"{PREFIX}.mel.input.bias"] = (cfg.hidden,)
    for i, spec in enumerate(mel_specs(cfg)):
        shapes[f"{PREFIX}.mel.layers.{i}.weight"] = spec.weight_shape
        shapes[f"{PREFIX}.mel.layers.{i}.bias"] = (spec.out_channels,)
    shapes[f"{PREFIX}.mel.proj.weight"] = (mel.n_mels, cfg.hidden)
    shapes[f"{PREFIX}.mel.proj.bias"] = (mel.n_mels,)
    return shapes


def embed_labels(labels: ContentLabels, table: npt.ArrayLike) -> Tensor2D:
    """(dim, T) columns looked up from a (classes, dim) table."""
    rows = np.asarray(table, dtype=DTYPE)
    index = np.asarray(labels, dtype=np.int64)
    if index.size and (index.min() < 0 or index.max() >= rows.shape[0]):
        raise ShapeError(f"content label outside [0, {rows.shape[0]})")
    return np.ascontiguousarray(rows[index].T)


@dataclass(frozen=True)
class DecoderState:
    pitch: tuple[ConvState, ...]
    mel: tuple[ConvState, ...]


class AcousticDecoder:
    """Stateless decoder; carry a :class:`DecoderState` between chunks of one stream."""

    def __init__(
        self,
        cfg: DecoderConfig,
        style: StyleConfig,
        extractor: ExtractorConfig,
        mel: MelConfig,
        weights: ModelWeights,
    ) -> None:
        if cfg.content_dim != extractor.d_model:
            raise ShapeError("decoder.content_dim must equal extractor.d_model")
        self.cfg = cfg
        self.style = style
        self.extractor = extractor
        self.mel = mel
        self.weights = weights
        self._pitch_specs = pitch_specs(cfg, style)
        self._mel_specs = mel_specs(cfg)

    def new_state(self) -> DecoderState:
        return DecoderState(
            pitch=tuple(ConvState.zeros(spec) for spec in self._pitch_specs),
            mel=tuple(ConvState.zeros(spec) for spec in self._mel_specs),
        )

    def embed(self, labels: ContentLabels) -> Tensor2D:
        return embed_labels(labels, self.weights[f"{PREFIX}.embedding"])

    def pitch_features(self, content_emb: Tensor2D, z_t: npt.ArrayLike, z_s: Tensor2D) -> Tensor2D:
        """[content ∥ timbre ∥ style] per frame."""
        frames = content_emb.shape[1]
        if z_s.shape[1] != frames:
            raise ShapeError(f"style has {z_s.shape[1]} frames, content {frames}")
        column = np.asarray(z_t, dtype=DTYPE)[:, np.newaxis]
        timbre = np.broadcast_to(column, (column.shape[0], frames))
        return np.concatenate([content_emb, timbre, z_s], axis=0).astype(DTYPE, copy=False)

    def predict_pitch(
        self, features: Tensor2D, state: DecoderState
    ) -> tuple[PitchTrack, DecoderState]:
        """Natural-log F0 per frame from a dilated causal conv stack."""
        w = self.weights
        h = features
        tails: list[ConvState] = []
        for i, (spec, conv_state) in enumerate(zip(self._pitch_specs, state.pitch, strict=True)):
            base = f"{PREFIX}.pitch.convs.{i}"
            weight, bias = w.wide(f"{base}.weight"), w.wide(f"{base}.bias")
            h, tail = causal_conv1d(
                h, spec, weight, bias, conv_state, taps=w.taps(f"{base}.weight")
            )
            h = leaky_relu(h, LEAKY_SLOPE)
            tails.append(tail)
        proj = f"{PREFIX}.pitch.proj"
        logf0 = linear(h, w.wide(f"{proj}.weight"), w.wide(f"{proj}.bias"))
        return np.ascontiguousarray(logf0[0]), replace(state, pitch=tuple(tails))

    def pitch_embedding(self, logf0: PitchTrack) -> Tensor2D:
        w = self.weights
        return linear(
            np.asarray(logf0, dtype=DTYPE)[np.newaxis, :],
            w.wide(f"{PREFIX}.pitch_embed.weight"),
            w.wide(f"{PREFIX}.pitch_embed.bias"),
        )

    def decode_mel(self, fused: Tensor2D, state: DecoderState) -> tuple[Tensor2D, DecoderState]:
        """Gated residual causal stack; one 80-bin frame out per fused frame in."""
        expected = fused_dim(self.cfg, self.style)
        if fused.ndim != 2 or fused.shape[0] != expected:
            raise ShapeError(f"fused features need {expected} channels, got {fused.shape[0]}")
        w = self.weights
        h = linear(fused, w.wide(f"{PREFIX}.mel.input.weight"), w.wide(f"{PREFIX}.mel.input.bias"))
        tails: list[ConvState] = []
        for i, (spec, conv_state) in enumerate(zip(self._mel_specs, state.mel, strict=True)):
            base = f"{PREFIX}.mel.layers.{i}"
            weight, bias = w.wide(f"{base}.weight"), w.wide(f"{base}.bias")
            out, tail = causal_conv1d(
                h, spec, weight, bias, conv_state, taps=w.taps(f"{base}.weight")
            )
            h = h + gated(out)
            tails.append(tail)
        mel = linear(h, w.wide(f"{PREFIX}.mel.proj.weight"), w.wide(f"{PREFIX}.mel.proj.bias"))
        return mel, replace(state, mel=tuple(tails))

    def decode(
        self, content_emb: Tensor2D, z_t: npt.ArrayLike, z_s: Tensor2D, state: DecoderState
    ) -> tuple[Tensor2D, PitchTrack, DecoderState]:
        """Pitch, pitch embedding, fusion and mel decoding for one chunk."""
        features = self.pitch_features(content_emb, z_t, z_s)
        logf0, state = self.predict_pitch(features, state)
        fused = np.concatenate([features, self.pitch_embedding(logf0)], axis=0)
        mel, state = self.decode_mel(fused, state)
        return mel, logf0, state
