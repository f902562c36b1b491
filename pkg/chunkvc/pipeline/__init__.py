"""Chunk scheduling, reference preparation and latency accounting."""

from chunkvc.kernels.conv import receptive_field
from chunkvc.metrics.models import LatencyReport, overall_latency
from chunkvc.pipeline.context import convert_with_context, stream_convert
from chunkvc.pipeline.model import (
    ConversionModel,
    ReceptiveFields,
    ReferenceContext,
    receptive_fields,
)
from chunkvc.pipeline.session import StreamSession

__all__ = [
    "ConversionModel",
    "LatencyReport",
    "ReceptiveFields",
    "ReferenceContext",
    "StreamSession",
    "convert_with_context",
    "overall_latency",
    "receptive_field",
    "receptive_fields",
    "stream_convert",
]
