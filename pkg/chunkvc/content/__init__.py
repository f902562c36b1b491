"""Streaming content extraction (one label per 20 ms frame)."""

from chunkvc.content.extractor import StreamContentExtractor, project_labels, weight_shapes
from chunkvc.content.state import ContentLabels, ExtractorState, LayerCache, new_state

__all__ = [
    "ContentLabels",
    "ExtractorState",
    "LayerCache",
    "StreamContentExtractor",
    "new_state",
    "project_labels",
    "weight_shapes",
]
