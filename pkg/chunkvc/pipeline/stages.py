"""Chunk jobs and the content → main → vocoder stage chain.

Stages run inline, or on one thread each connected by bounded FIFO queues. Each stage
owns its own streaming state, so both modes compute identical outputs.
"""

from __future__ import annotations

import queue
import threading
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import structlog

from chunkvc.content.state import ContentLabels
from chunkvc.kernels.types import Tensor2D
from chunkvc.metrics.collector import LatencyCollector
from chunkvc.pipeline.model import ConversionModel, ReferenceContext

logger = structlog.get_logger()

Samples = np.ndarray


@dataclass(frozen=True)
class ChunkJob:
    index: int
    chunk: Tensor2D
    right: Tensor2D
    final: bool = False


class ContentStage:
    def __init__(self, model: ConversionModel, collector: LatencyCollector) -> None:
        self.model = model
        self.collector = collector
        self.state = model.extractor.new_state()

    def __call__(self, job: ChunkJob) -> ContentLabels:
        extractor = self.model.extractor
        with self.collector.stage("content"):
            if job.final:
                labels, self.state = extractor.flush(self.state, job.chunk)
            else:
                labels, self.state = extractor.process_chunk(self.state, job.chunk, job.right)
        return labels


class MainStage:
    def __init__(
        self, model: ConversionModel, reference: ReferenceContext, collector: LatencyCollector
    ) -> None:
        self.model = model
        self.reference = reference
        self.collector = collector
        self.state = model.decoder.new_state()

    def __call__(self, labels: ContentLabels) -> Tensor2D:
        with self.collector.stage("main"):
            mel, self.state = self.model.main_stage(labels, self.reference, self.state)
        return mel


class VocoderStage:
    def __init__(self, model: ConversionModel, collector: LatencyCollector) -> None:
        self.model = model
        self.collector = collector
        self.state = model.vocoder.new_state()

    def __call__(self, mel: Tensor2D) -> Samples:
        with self.collector.stage("vocoder"):
            samples, self.state = self.model.vocoder.vocode_chunk(mel, self.state)
        return samples


Stage = Callable[[Any], Any]


class SequentialStages:
    def __init__(self, stages: Sequence[Stage]) -> None:
        self.stages = list(stages)
        self._ready: list[Samples] = []

    def submit(self, job: ChunkJob) -> None:
        item: Any = job
        for stage in self.stages:
            item = stage(item)
        self._ready.append(item)

    def ready(self) -> list[Samples]:
        out, self._ready = self._ready, []
        return out

    def close(self) -> list[Samples]:
        return self.ready()


class _Stop:
    pass


@dataclass(frozen=True)
class _Failure:
    error: BaseException


_STOP = _Stop()


class ThreadedStages:
    """One worker thread per stage; queue ``i`` feeds stage ``i``.

    The output queue is unbounded so a blocked submitter can never deadlock the chain.
    """

    def __init__(self, stages: Sequence[Stage], queue_size: int) -> None:
        self.stages = list(stages)
        self._queues: list[queue.Queue[Any]] = [
            queue.Queue(maxsize=queue_size) for _ in self.stages
        ]
        self._queues.append(queue.Queue())
        self._threads = [
            threading.Thread(
                target=self._work, args=(i,), name=f"chunkvc-stage-{i}", daemon=True
            )
            for i in range(len(self.stages))
        ]
        self._closed = False
        for thread in self._threads:
            thread.start()

    def _work(self, index: int) -> None:
        inbox, outbox = self._queues[index], self._queues[index + 1]
        stage = self.stages[index]
        while True:
            item = inbox.get()
            if item is _STOP or isinstance(item, _Failure):
                outbox.put(item)
                if item is _STOP:
                    return
                continue
            try:
                outbox.put(stage(item))
            except Exception as exc:  # noqa: BLE001
                logger.error("stage_failed", stage=index, error=str(exc))
                outbox.put(_Failure(exc))

    def submit(self, job: ChunkJob) -> None:
        self._queues[0].put(job)

    def _unwrap(self, item: Any) -> Samples:
        if isinstance(item, _Failure):
            raise item.error
        return item

    def ready(self) -> list[Samples]:
        out: list[Samples] = []
        outbox = self._queues[-1]
        while True:
            try:
                item = outbox.get_nowait()
            except queue.Empty:
                return out
            if item is _STOP:
                outbox.put(item)
                return out
            out.append(self._unwrap(item))

    def close(self) -> list[Samples]:
        """Drain every queued chunk and stop the workers."""
        if self._closed:
            return []
        self._closed = True
        self._queues[0].put(_STOP)
        out: list[Samples] = []
        failure: _Failure | None = None
        while True:
            item = self._queues[-1].get()
            if item is _STOP:
                break
            if isinstance(item, _Failure):
                failure = failure or item
                continue
            out.append(item)
        for thread in self._threads:
            thread.join()
        if failure is not None:
            raise failure.error
        return out
