"""Strictly causal mel-to-waveform synthesis."""

from chunkvc.vocoder.shuffle import (
    ConvLayer,
    ShuffleVocoder,
    VocoderState,
    receptive_frames,
    residual_block,
    upsample_stage,
    weight_shapes,
)

__all__ = [
    "ConvLayer",
    "ShuffleVocoder",
    "VocoderState",
    "receptive_frames",
    "residual_block",
    "upsample_stage",
    "weight_shapes",
]
