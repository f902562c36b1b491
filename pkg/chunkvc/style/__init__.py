"""Timbre and style-token encoding of the reference utterance."""

from chunkvc.style.encoder import (
    StyleEncoder,
    StyleTokens,
    TimbreEmbedding,
    positional_encoding,
    weight_shapes,
)
from chunkvc.style.losses import (
    contrastive_loss,
    contrastive_loss_softplus,
    contrastive_pairs,
    cosine_similarity,
    cvq_loss,
)
from chunkvc.style.quantizer import Codebook, nearest_code, quantize, reinit_unused_codes

__all__ = [
    "Codebook",
    "StyleEncoder",
    "StyleTokens",
    "TimbreEmbedding",
    "contrastive_loss",
    "contrastive_loss_softplus",
    "contrastive_pairs",
    "cosine_similarity",
    "cvq_loss",
    "nearest_code",
    "positional_encoding",
    "quantize",
    "reinit_unused_codes",
    "weight_shapes",
]
