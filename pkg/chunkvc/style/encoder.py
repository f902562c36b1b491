"""Reference-side style encoding: global timbre, quantized style tokens, per-frame alignment.

The reference utterance is processed once, offline and in full, so the conv stacks here
read both past and future frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import structlog

from chunkvc.config.schema import DecoderConfig, MelConfig, StyleConfig
from chunkvc.exceptions import ShapeError
from chunkvc.kernels.attention import attention_weights, scaled_dot_attention
from chunkvc.kernels.conv import centered_conv1d
from chunkvc.kernels.ops import leaky_relu, linear, mean_pool_time
from chunkvc.kernels.types import DTYPE, ConvSpec, Tensor2D
from chunkvc.models import ModelWeights
from chunkvc.style.quantizer import Codebook, quantize

logger = structlog.get_logger()

PREFIX = "style"
LEAKY_SLOPE = 0.1

TimbreEmbedding = npt.NDArray[np.float32]


@dataclass(frozen=True)
class StyleTokens:
    """One quantized token per ``token_frames`` reference frames.

    ``vectors`` and ``latents`` are (d_code, S): the selected codes and the
    pre-quantization latents they were chosen for.
    """

    indices: npt.NDArray[np.int64]
    vectors: Tensor2D
    latents: Tensor2D

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    @property
    def positions(self) -> npt.NDArray[np.int64]:
        return np.arange(len(self), dtype=np.int64)


def positional_encoding(positions: int, dim: int) -> Tensor2D:
    """Sinusoidal table of shape (dim, positions): sin on even channels, cos on odd."""
    pos = np.arange(positions, dtype=np.float64)[np.newaxis, :]
    channel = np.arange(dim)[:, np.newaxis]
    rates = np.power(10000.0, -(2 * (channel // 2)) / dim)
    angles = pos * rates
    table = np.where(channel % 2 == 0, np.sin(angles), np.cos(angles))
    return table.astype(DTYPE)


def _conv_specs(in_channels: int, hidden: int, layers: int, kernel: int) -> list[ConvSpec]:
    return [
        ConvSpec(in_channels if i == 0 else hidden, hidden, kernel=kernel) for i in range(layers)
    ]


def weight_shapes(
    cfg: StyleConfig, mel: MelConfig, decoder: DecoderConfig
) -> dict[str, tuple[int, ...]]:
    shapes: dict[str, tuple[int, ...]] = {}
    for group, layers, kernel in (
        ("timbre", cfg.timbre_layers, cfg.timbre_kernel),
        ("tokens", cfg.style_layers, cfg.style_kernel),
    ):
        for i, spec in enumerate(_conv_specs(mel.n_mels, cfg.hidden, layers, kernel)):
            shapes[f"{PREFIX}.{group}.convs.{i}.weight"] = spec.weight_shape
            shapes[f"{PREFIX}.{group}.convs.{i}.bias"] = (spec.out_channels,)
    shapes[f"{PREFIX}.timbre.proj.weight"] = (cfg.d_timbre, cfg.hidden)
    shapes[f"{PREFIX}.timbre.proj.bias"] = (cfg.d_timbre,)
    shapes[f"{PREFIX}.tokens.proj.weight"] = (cfg.d_code, cfg.hidden)
    shapes[f"{PREFIX}.tokens.proj.bias"] = (cfg.d_code,)
    shapes[f"{PREFIX}.codebook"] = (cfg.codebook_size, cfg.d_code)
    shapes[f"{PREFIX}.align.query.weight"] = (cfg.d_attn, decoder.content_dim + cfg.d_timbre)
    shapes[f"{PREFIX}.align.query.bias"] = (cfg.d_attn,)
    shapes[f"{PREFIX}.align.key.weight"] = (cfg.d_attn, cfg.d_code)
    shapes[f"{PREFIX}.align.key.bias"] = (cfg.d_attn,)
    shapes[f"{PREFIX}.align.value.weight"] = (cfg.d_code, cfg.d_code)
    shapes[f"{PREFIX}.align.value.bias"] = (cfg.d_code,)
    return shapes


class StyleEncoder:
    def __init__(
        self, cfg: StyleConfig, mel: MelConfig, decoder: DecoderConfig, weights: ModelWeights
    ) -> None:
        self.cfg = cfg
        self.mel = mel
        self.decoder = decoder
        self.weights = weights
        self.codebook = Codebook(entries=np.array(weights[f"{PREFIX}.codebook"]))
        if self.codebook.dim != cfg.d_code:
            raise ShapeError(f"codebook dim {self.codebook.dim} ≠ style.d_code {cfg.d_code}")

    def _conv_stack(self, group: str, m_rf: Tensor2D, layers: int, kernel: int) -> Tensor2D:
        if m_rf.ndim != 2 or m_rf.shape[0] != self.mel.n_mels:
            raise ShapeError(f"reference mel must have {self.mel.n_mels} bins")
        if m_rf.shape[1] < 1:
            raise ShapeError("reference mel is empty")
        h = m_rf
        for i, spec in enumerate(_conv_specs(self.mel.n_mels, self.cfg.hidden, layers, kernel)):
            base = f"{PREFIX}.{group}.convs.{i}"
            w = self.weights
            h = centered_conv1d(
                h,
                spec,
                w.wide(f"{base}.weight"),
                w.wide(f"{base}.bias"),
                taps=w.taps(f"{base}.weight"),
            )
            h = leaky_relu(h, LEAKY_SLOPE)
        return h

    def encode_timbre(self, m_rf: Tensor2D) -> TimbreEmbedding:
        """Global speaker vector (d_timbre,) from the whole reference."""
        h = self._conv_stack("timbre", m_rf, self.cfg.timbre_layers, self.cfg.timbre_kernel)
        pooled = mean_pool_time(h, h.shape[1])
        w = self.weights
        z_t = linear(
            pooled, w.wide(f"{PREFIX}.timbre.proj.weight"), w.wide(f"{PREFIX}.timbre.proj.bias")
        )
        return np.ascontiguousarray(z_t[:, 0])

    def style_latents(self, m_rf: Tensor2D) -> Tensor2D:
        """Pre-quantization latents z, one column per ``token_frames`` reference frames."""
        h = self._conv_stack("tokens", m_rf, self.cfg.style_layers, self.cfg.style_kernel)
        pooled = mean_pool_time(h, self.cfg.token_frames)
        w = self.weights
        return linear(
            pooled, w.wide(f"{PREFIX}.tokens.proj.weight"), w.wide(f"{PREFIX}.tokens.proj.bias")
        )

    def encode_style_tokens(self, m_rf: Tensor2D, codebook: Codebook | None = None) -> StyleTokens:
        """Quantized style tokens of a reference.

        Usage is counted on ``codebook`` when given, else on a private copy, so the
        model's shared codebook is never written.
        """
        book = self.codebook.copy() if codebook is None else codebook
        latents = self.style_latents(m_rf)
        indices = np.zeros(latents.shape[1], dtype=np.int64)
        vectors = np.zeros_like(latents)
        for s in range(latents.shape[1]):
            indices[s], vectors[:, s] = quantize(latents[:, s], book)
        return StyleTokens(indices=indices, vectors=vectors, latents=latents)

    def _queries(self, content_emb: Tensor2D, z_t: TimbreEmbedding) -> Tensor2D:
        if content_emb.shape[0] != self.decoder.content_dim:
            raise ShapeError(
                f"content embedding has {content_emb.shape[0]} channels, "
                f"expected {self.decoder.content_dim}"
            )
        column = np.asarray(z_t, dtype=DTYPE)[:, np.newaxis]
        timbre = np.broadcast_to(column, (column.shape[0], content_emb.shape[1]))
        w = self.weights
        return linear(
            np.concatenate([content_emb, timbre], axis=0),
            w.wide(f"{PREFIX}.align.query.weight"),
            w.wide(f"{PREFIX}.align.query.bias"),
        )

    def _keys_values(self, tokens: StyleTokens) -> tuple[Tensor2D, Tensor2D]:
        if len(tokens) == 0:
            raise ShapeError("style alignment needs at least one token")
        placed = tokens.vectors + positional_encoding(len(tokens), self.cfg.d_code)
        w = self.weights
        keys = linear(
            placed, w.wide(f"{PREFIX}.align.key.weight"), w.wide(f"{PREFIX}.align.key.bias")
        )
        values = linear(
            placed, w.wide(f"{PREFIX}.align.value.weight"), w.wide(f"{PREFIX}.align.value.bias")
        )
        return keys, values

    def align_weights(
        self, content_emb: Tensor2D, z_t: TimbreEmbedding, tokens: StyleTokens
    ) -> npt.NDArray[np.float64]:
        """(frames, tokens) attention distribution used by :meth:`align_style`."""
        keys, _ = self._keys_values(tokens)
        return attention_weights(self._queries(content_emb, z_t), keys)

    def align_style(
        self, content_emb: Tensor2D, z_t: TimbreEmbedding, tokens: StyleTokens
    ) -> Tensor2D:
        """(d_code, frames): one style vector per content frame, or zeros when style is off."""
        keys, values = self._keys_values(tokens)
        queries = self._queries(content_emb, z_t)
        if not self.cfg.enabled:
            return np.zeros((self.cfg.d_code, content_emb.shape[1]), dtype=DTYPE)
        return scaled_dot_attention(queries, keys, values)
