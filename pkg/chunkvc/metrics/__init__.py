"""Latency and real-time-factor accounting."""

from chunkvc.metrics.collector import LatencyCollector
from chunkvc.metrics.models import (
    REPORT_KEYS,
    STAGES,
    LatencyReport,
    StageTiming,
    overall_latency,
)

__all__ = [
    "REPORT_KEYS",
    "STAGES",
    "LatencyCollector",
    "LatencyReport",
    "StageTiming",
    "overall_latency",
]
