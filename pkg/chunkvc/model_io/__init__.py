"""Weight tables, seeded initialisation and the ``.cnvc`` container."""

from chunkvc.model_io.container import (
    FORMAT_VERSION,
    MAGIC,
    check_weights,
    decode_model,
    encode_model,
    load_model,
    save_model,
)
from chunkvc.model_io.init import init_weights, tensor_stream
from chunkvc.model_io.shapes import tensor_kind, weight_table

__all__ = [
    "FORMAT_VERSION",
    "MAGIC",
    "check_weights",
    "decode_model",
    "encode_model",
    "init_weights",
    "load_model",
    "save_model",
    "tensor_kind",
    "tensor_stream",
    "weight_table",
]
