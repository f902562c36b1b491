"""Per-stage wall-clock accounting for streaming sessions."""

from __future__ import annotations

import threading
import time
from collections.abc import Iterator
from contextlib import contextmanager

from chunkvc.exceptions import LatencyError
from chunkvc.metrics.models import STAGES, LatencyReport, StageTiming


class LatencyCollector:
    """Accumulates processing time per stage and the audio duration it covered.

    Stages record from their own threads in pipeline-parallel mode.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._stage_ms: dict[str, list[float]] = {name: [] for name in STAGES}
        self._audio_ms = 0.0
        self._chunks = 0

    def record(self, stage: str, elapsed_ms: float) -> None:
        if stage not in self._stage_ms:
            raise LatencyError(f"unknown stage: {stage}")
        with self._lock:
            self._stage_ms[stage].append(float(elapsed_ms))

    def add_audio(self, duration_ms: float) -> None:
        """Count one processed chunk covering ``duration_ms`` of input audio."""
        with self._lock:
            self._audio_ms += float(duration_ms)
            self._chunks += 1

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield None
        finally:
            self.record(name, (time.perf_counter() - start) * 1000.0)

    @property
    def chunks(self) -> int:
        return self._chunks

    @property
    def audio_ms(self) -> float:
        return self._audio_ms

    def stage_timings(self) -> list[StageTiming]:
        with self._lock:
            snapshot = {name: list(values) for name, values in self._stage_ms.items()}
        return [
            StageTiming(
                name=name,
                chunks=len(values),
                total_ms=sum(values),
                mean_ms=_average(values),
                p95_ms=_percentile(values, 95),
            )
            for name, values in snapshot.items()
        ]

    def report(self, chunk_ms: float, right_context_ms: float) -> LatencyReport:
        if self._chunks == 0 or self._audio_ms <= 0.0:
            raise LatencyError("no chunks processed yet")
        with self._lock:
            rtfs = [sum(self._stage_ms[name]) / self._audio_ms for name in STAGES]
        return LatencyReport.from_rtfs(rtfs, chunk_ms, right_context_ms)


def _average(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def _percentile(values: list[float], percentile: int) -> float:
    if not values:
        return 0.0
    sorted_vals = sorted(values)
    index = max(int(round((percentile / 100) * (len(sorted_vals) - 1))), 0)
    return float(sorted_vals[index])
