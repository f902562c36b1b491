"""Chunkwise streaming conversion session."""

from __future__ import annotations

import numpy as np
import structlog

from chunkvc.dsp.mel import MelStream
from chunkvc.dsp.wav import PcmAudio
from chunkvc.exceptions import SampleRateError, StreamStateError
from chunkvc.kernels.types import DTYPE, empty
from chunkvc.metrics.collector import LatencyCollector
from chunkvc.metrics.models import LatencyReport, StageTiming
from chunkvc.pipeline.model import ConversionModel, ReferenceContext
from chunkvc.pipeline.stages import (
    ChunkJob,
    ContentStage,
    MainStage,
    SequentialStages,
    ThreadedStages,
    VocoderStage,
)

logger = structlog.get_logger()


class StreamSession:
    """Buffers input audio and converts it one chunk at a time.

    Chunk ``i`` is processed once ``(i + 1 + R) · chunk_samples`` input samples have
    arrived, ``R`` being the number of right-context chunks. Every processed chunk emits
    exactly ``chunk_samples`` samples; :meth:`flush` drains the remainder so the total
    output length equals the total input length.
    """

    def __init__(self, model: ConversionModel, parallel: bool | None = None) -> None:
        cfg = model.cfg
        self.model = model
        self.cfg = cfg
        self.parallel = cfg.session.pipeline_parallel if parallel is None else parallel
        self.chunk_frames = cfg.extractor.chunk_frames
        self.right_frames = cfg.extractor.right_context_frames
        self.chunk_samples = self.chunk_frames * cfg.mel.hop
        self.collector = LatencyCollector()
        self.reference: ReferenceContext | None = None
        self._mel_stream = MelStream(cfg.mel)
        self._mel = empty(cfg.mel.n_mels)
        self._runner: SequentialStages | ThreadedStages | None = None
        self._next_chunk = 0
        self._samples_in = 0
        self._samples_out = 0
        self._finished = False

    # -- reference --------------------------------------------------------------------

    def prepare_reference(self, reference: PcmAudio) -> ReferenceContext:
        """Encode the target speaker; must happen before the first push."""
        if self._runner is not None:
            raise StreamStateError("reference cannot change once streaming has started")
        self.reference = self.model.prepare_reference(reference)
        return self.reference

    # -- streaming ----------------------------------------------------------------------

    def _stages(self) -> SequentialStages | ThreadedStages:
        if self._runner is None:
            if self.reference is None:
                raise StreamStateError("prepare_reference must be called before pushing audio")
            stages = [
                ContentStage(self.model, self.collector),
                MainStage(self.model, self.reference, self.collector),
                VocoderStage(self.model, self.collector),
            ]
            if self.parallel:
                self._runner = ThreadedStages(stages, self.cfg.session.queue_size)
            else:
                self._runner = SequentialStages(stages)
        return self._runner

    def _dispatch(self, job: ChunkJob) -> None:
        self._stages().submit(job)
        frames = job.chunk.shape[1]
        self.collector.add_audio(frames * self.cfg.mel.frame_ms)
        logger.debug(
            "chunk_processed",
            chunk_index=job.index,
            frames=frames,
            final=job.final,
        )
        self._next_chunk += 1

    def _take_chunk(self, final_pad: bool) -> ChunkJob:
        f, r = self.chunk_frames, self.right_frames
        chunk = self._mel[:, :f]
        right = self._mel[:, f : f + r]
        if right.shape[1] < r:
            if not final_pad:
                raise StreamStateError("right context not yet available")
            pad = np.zeros((self._mel.shape[0], r - right.shape[1]), dtype=DTYPE)
            right = np.concatenate([right, pad], axis=1)
        self._mel = self._mel[:, f:]
        return ChunkJob(index=self._next_chunk, chunk=chunk, right=right)

    def _emit(self, parts: list[np.ndarray], limit: int | None = None) -> PcmAudio:
        samples = np.concatenate(parts) if parts else np.zeros(0, dtype=np.float32)
        if limit is not None:
            samples = samples[:limit]
        self._samples_out += len(samples)
        return PcmAudio(sample_rate=self.cfg.mel.sample_rate, samples=samples)

    def push_chunk(self, audio: PcmAudio) -> PcmAudio:
        """Buffer ``audio``; return the output of every chunk it completes (maybe empty)."""
        if self._finished:
            raise StreamStateError("session already flushed")
        runner = self._stages()
        if audio.sample_rate != self.cfg.mel.sample_rate:
            raise SampleRateError(
                f"input is {audio.sample_rate} Hz, expected {self.cfg.mel.sample_rate}"
            )
        self._samples_in += len(audio)
        frames = self._mel_stream.push(audio.samples)
        self._mel = np.concatenate([self._mel, frames], axis=1)
        while self._mel.shape[1] >= self.chunk_frames + self.right_frames:
            self._dispatch(self._take_chunk(final_pad=False))
        return self._emit(runner.ready())

    def flush(self) -> PcmAudio:
        """Process whatever input is still buffered; later calls return empty audio."""
        if self._finished:
            return PcmAudio.empty(self.cfg.mel.sample_rate)
        self._finished = True
        if self._runner is None and self._samples_in == 0:
            return PcmAudio.empty(self.cfg.mel.sample_rate)
        pending = self._mel_stream.pending_samples
        if pending:
            tail = np.zeros(self.cfg.mel.hop - pending, dtype=np.float32)
            self._mel = np.concatenate([self._mel, self._mel_stream.push(tail)], axis=1)
        while self._mel.shape[1] >= self.chunk_frames:
            self._dispatch(self._take_chunk(final_pad=True))
        if self._mel.shape[1] > 0:
            tail_job = ChunkJob(
                index=self._next_chunk,
                chunk=self._mel,
                right=empty(self._mel.shape[0]),
                final=True,
            )
            self._mel = empty(self._mel.shape[0])
            self._dispatch(tail_job)
        runner = self._stages()
        parts = runner.ready() + runner.close()
        out = self._emit(parts, limit=self._samples_in - self._samples_out)
        logger.info(
            "stream_flushed",
            chunks=self._next_chunk,
            samples_in=self._samples_in,
            samples_out=self._samples_out,
        )
        return out

    def close(self) -> None:
        """Stop worker threads without draining buffered input."""
        if self._runner is not None:
            self._runner.close()
        self._finished = True

    # -- accounting -----------------------------------------------------------------------

    @property
    def samples_in(self) -> int:
        return self._samples_in

    @property
    def samples_out(self) -> int:
        return self._samples_out

    @property
    def chunks_processed(self) -> int:
        return self._next_chunk

    def latency_report(self) -> LatencyReport:
        session = self.cfg.session
        return self.collector.report(
            chunk_ms=float(session.chunk_ms),
            right_context_ms=session.effective_right_context_ms,
        )

    def stage_timings(self) -> list[StageTiming]:
        return self.collector.stage_timings()
