"""Dense numeric primitives shared by every model component."""

from chunkvc.kernels.attention import (
    attention_weights,
    multi_head_attention,
    scaled_dot_attention,
    softmax,
)
from chunkvc.kernels.conv import causal_conv1d, centered_conv1d, receptive_field, tap_major
from chunkvc.kernels.ops import (
    argmax_frames,
    gated,
    layer_norm,
    leaky_relu,
    linear,
    mean_pool_time,
    pixel_shuffle,
    pixel_unshuffle,
    relu,
    zero_stuff,
)
from chunkvc.kernels.types import ConvSpec, ConvState, Tensor2D, as_tensor

__all__ = [
    "ConvSpec",
    "ConvState",
    "Tensor2D",
    "argmax_frames",
    "as_tensor",
    "attention_weights",
    "causal_conv1d",
    "centered_conv1d",
    "gated",
    "layer_norm",
    "leaky_relu",
    "linear",
    "mean_pool_time",
    "multi_head_attention",
    "pixel_shuffle",
    "pixel_unshuffle",
    "receptive_field",
    "relu",
    "scaled_dot_attention",
    "softmax",
    "tap_major",
    "zero_stuff",
]
