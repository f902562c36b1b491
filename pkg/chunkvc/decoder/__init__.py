"""Pitch prediction and mel decoding."""

from chunkvc.decoder.acoustic import (
    AcousticDecoder,
    DecoderState,
    PitchTrack,
    embed_labels,
    fused_dim,
    mel_specs,
    pitch_specs,
    weight_shapes,
)

__all__ = [
    "AcousticDecoder",
    "DecoderState",
    "PitchTrack",
    "embed_labels",
    "fused_dim",
    "mel_specs",
    "pitch_specs",
    "weight_shapes",
]
