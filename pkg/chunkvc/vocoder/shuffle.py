"""Causal shuffle vocoder.

Every convolution is causal at its own temporal rate. An upsampling stage is either a
causal conv to ``r·C`` channels followed by a pixel shuffle, or (``zero_stuff`` mode)
zero insertion followed by a ``C → C`` causal conv at the upsampled rate. Each stage is
followed by parallel residual branches whose outputs are averaged onto a skip path.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
import structlog

from chunkvc.config.schema import MelConfig, VocoderConfig
from chunkvc.exceptions import ShapeError
from chunkvc.kernels.conv import causal_conv1d
from chunkvc.kernels.ops import leaky_relu, pixel_shuffle, zero_stuff
from chunkvc.kernels.types import ACC_DTYPE, DTYPE, Array, ConvSpec, ConvState, Tensor2D
from chunkvc.models import ModelWeights

logger = structlog.get_logger()

PREFIX = "vocoder"

Samples = np.ndarray


@dataclass(frozen=True)
class ConvLayer:
    """A named causal conv with its weights; ``rate`` is sub-frames per mel frame.

    ``taps`` holds the tap-major weight stack when the layer is built from a model.
    """

    name: str
    spec: ConvSpec
    weight: Array
    bias: Array | None
    rate: int = 1
    taps: Array | None = None

    def __call__(self, x: Tensor2D, states: Mapping[str, ConvState]) -> tuple[Tensor2D, ConvState]:
        return causal_conv1d(
            x, self.spec, self.weight, self.bias, states[self.name], taps=self.taps
        )


BranchLayers = Sequence[tuple[ConvLayer, ConvLayer]]


@dataclass(frozen=True)
class VocoderState:
    """Carried tail of every causal conv, keyed by the conv's weight prefix."""

    convs: Mapping[str, ConvState]

    def __getitem__(self, name: str) -> ConvState:
        return self.convs[name]


def _layout(cfg: VocoderConfig, mel: MelConfig) -> list[tuple[str, ConvSpec, int, str | None]]:
    """(name, spec, rate, branch) for every conv in execution order.

    ``branch`` names the parallel residual branch a conv belongs to, None on the main path.
    """
    c = cfg.base_channels
    layout: list[tuple[str, ConvSpec, int, str | None]] = [
        (f"{PREFIX}.pre", ConvSpec(mel.n_mels, c, cfg.pre_kernel), 1, None)
    ]
    rate = 1
    for n, r in enumerate(cfg.upsample_factors):
        stage = f"{PREFIX}.stages.{n}.upsample"
        if cfg.upsample_mode == "shuffle":
            layout.append((stage, ConvSpec(c, r * c, cfg.stage_kernel), rate, None))
            rate *= r
        else:
            rate *= r
            layout.append((stage, ConvSpec(c, c, cfg.stage_kernel), rate, None))
        for b, kernel in enumerate(cfg.resblock_kernels):
            branch = f"{PREFIX}.stages.{n}.blocks.{b}"
            for j, dilation in enumerate(cfg.resblock_dilations):
                base = f"{branch}.layers.{j}"
                layout.append((f"{base}.conv1", ConvSpec(c, c, kernel, dilation), rate, branch))
                layout.append((f"{base}.conv2", ConvSpec(c, c, kernel), rate, branch))
    layout.append((f"{PREFIX}.post", ConvSpec(c, 1, cfg.post_kernel), rate, None))
    return layout


def weight_shapes(cfg: VocoderConfig, mel: MelConfig) -> dict[str, tuple[int, ...]]:
    shapes: dict[str, tuple[int, ...]] = {}
    for name, spec, _, _ in _layout(cfg, mel):
        shapes[f"{name}.weight"] = spec.weight_shape
        shapes[f"{name}.bias"] = (spec.out_channels,)
    return shapes


def receptive_frames(cfg: VocoderConfig, mel: MelConfig) -> int:
    """Mel frames (current one included) that can reach a frame's samples.

    Each conv contributes its history rounded up to whole mel frames; parallel residual
    branches contribute their longest chain.
    """
    frames = 1
    branch_frames: dict[str, int] = {}
    for _, spec, rate, branch in _layout(cfg, mel):
        span = math.ceil(spec.history / rate)
        if branch is not None:
            branch_frames[branch] = branch_frames.get(branch, 0) + span
            continue
        if branch_frames:
            frames += max(branch_frames.values())
            branch_frames = {}
        frames += span
    return frames


def upsample_stage(
    x: Tensor2D, layer: ConvLayer, factor: int, mode: str, states: Mapping[str, ConvState]
) -> tuple[Tensor2D, ConvState]:
    """(C, T) → (C, factor·T)."""
    if mode == "shuffle":
        widened, tail = layer(x, states)
        return pixel_shuffle(widened, factor), tail
    return layer(zero_stuff(x, factor), states)


def residual_block(
    x: Tensor2D, branches: Sequence[BranchLayers], states: Mapping[str, ConvState], slope: float
) -> tuple[Tensor2D, dict[str, ConvState]]:
    """x + mean over branches; a branch chains lrelu → dilated conv → lrelu → conv."""
    if not branches:
        raise ShapeError("residual block needs at least one branch")
    tails: dict[str, ConvState] = {}
    total = np.zeros(x.shape, dtype=ACC_DTYPE)
    for branch in branches:
        h = x
        for conv1, conv2 in branch:
            h, tails[conv1.name] = conv1(leaky_relu(h, slope), states)
            h, tails[conv2.name] = conv2(leaky_relu(h, slope), states)
        if h.shape != x.shape:
            raise ShapeError(f"branch output {h.shape} ≠ input {x.shape}")
        total += h
    out = x.astype(ACC_DTYPE) + total / len(branches)
    return out.astype(DTYPE), tails


class ShuffleVocoder:
    def __init__(self, cfg: VocoderConfig, mel: MelConfig, weights: ModelWeights) -> None:
        if math.prod(cfg.upsample_factors) != mel.hop:
            raise ShapeError(
                f"upsample factors multiply to {math.prod(cfg.upsample_factors)}, hop is {mel.hop}"
            )
        self.cfg = cfg
        self.mel = mel
        self.weights = weights
        self._layers = {
            name: ConvLayer(
                name=name,
                spec=spec,
                weight=weights.wide(f"{name}.weight"),
                bias=weights.wide(f"{name}.bias"),
                rate=rate,
                taps=weights.taps(f"{name}.weight"),
            )
            for name, spec, rate, _ in _layout(cfg, mel)
        }

    def new_state(self) -> VocoderState:
        return VocoderState(
            convs={name: ConvState.zeros(layer.spec) for name, layer in self._layers.items()}
        )

    @property
    def samples_per_frame(self) -> int:
        return math.prod(self.cfg.upsample_factors)

    def receptive_frames(self) -> int:
        return receptive_frames(self.cfg, self.mel)

    def _branches(self, stage: int) -> list[list[tuple[ConvLayer, ConvLayer]]]:
        cfg = self.cfg
        branches = []
        for b in range(len(cfg.resblock_kernels)):
            pairs = []
            for j in range(len(cfg.resblock_dilations)):
                base = f"{PREFIX}.stages.{stage}.blocks.{b}.layers.{j}"
                pairs.append((self._layers[f"{base}.conv1"], self._layers[f"{base}.conv2"]))
            branches.append(pairs)
        return branches

    def vocode_chunk(self, mel: Tensor2D, state: VocoderState) -> tuple[Samples, VocoderState]:
        """``hop`` samples in (−1, 1) per mel frame."""
        if mel.ndim != 2 or mel.shape[0] != self.mel.n_mels:
            raise ShapeError(f"vocoder input must have {self.mel.n_mels} bins")
        cfg = self.cfg
        tails: dict[str, ConvState] = {}
        pre = self._layers[f"{PREFIX}.pre"]
        h, tails[pre.name] = pre(mel, state.convs)
        for n, factor in enumerate(cfg.upsample_factors):
            layer = self._layers[f"{PREFIX}.stages.{n}.upsample"]
            h, tails[layer.name] = upsample_stage(h, layer, factor, cfg.upsample_mode, state.convs)
            h, block_tails = residual_block(h, self._branches(n), state.convs, cfg.leaky_slope)
            tails.update(block_tails)
        post = self._layers[f"{PREFIX}.post"]
        wave, tails[post.name] = post(leaky_relu(h, cfg.leaky_slope), state.convs)
        samples = np.tanh(wave[0].astype(ACC_DTYPE)).astype(DTYPE)
        return samples, VocoderState(convs=tails)
