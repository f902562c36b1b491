"""Whole-file conversion helpers, including the sliding-context reference path."""

from __future__ import annotations

import math

import numpy as np
import structlog

from chunkvc.dsp.mel import mel_spectrogram
from chunkvc.dsp.wav import PcmAudio
from chunkvc.exceptions import SampleRateError
from chunkvc.pipeline.model import ConversionModel, ReferenceContext, receptive_fields
from chunkvc.pipeline.session import StreamSession

logger = structlog.get_logger()


def stream_convert(
    session: StreamSession, source: PcmAudio, slice_samples: int | None = None
) -> PcmAudio:
    """Push ``source`` in fixed-size slices (one chunk by default), then flush."""
    step = slice_samples or session.chunk_samples
    if step < 1:
        raise ValueError("slice_samples must be >= 1")
    parts = []
    for start in range(0, len(source), step):
        piece = PcmAudio(source.sample_rate, source.samples[start : start + step])
        parts.append(session.push_chunk(piece))
    parts.append(session.flush())
    return PcmAudio.concat(parts, sample_rate=source.sample_rate)


def convert_with_context(
    model: ConversionModel, source: PcmAudio, reference: ReferenceContext
) -> PcmAudio:
    """Recompute every chunk from a receptive-field window with fresh decoder/vocoder state.

    Content labels come from one sequential extractor pass. For each chunk the pitch
    predictor, mel decoder and vocoder restart from zero state on the chunk plus
    :attr:`ReceptiveFields.context_frames` preceding frames, and only the chunk's own
    samples are kept.
    """
    cfg = model.cfg
    if source.sample_rate != cfg.mel.sample_rate:
        raise SampleRateError(f"source is {source.sample_rate} Hz, expected {cfg.mel.sample_rate}")
    hop = cfg.mel.hop
    total = len(source)
    if total == 0:
        return PcmAudio.empty(source.sample_rate)
    frames = math.ceil(total / hop)
    padded = np.zeros(frames * hop, dtype=np.float32)
    padded[:total] = source.samples
    mel = mel_spectrogram(PcmAudio(source.sample_rate, padded), cfg.mel)

    labels = model.extractor.run(mel)
    content_emb = model.decoder.embed(labels)
    z_s = model.style.align_style(content_emb, reference.z_t, reference.tokens)
    context = receptive_fields(cfg).context_frames

    chunk = cfg.extractor.chunk_frames
    parts = []
    for start in range(0, frames, chunk):
        end = min(start + chunk, frames)
        window = max(0, start - context)
        mel_w, _, _ = model.decoder.decode(
            content_emb[:, window:end],
            reference.z_t,
            z_s[:, window:end],
            model.decoder.new_state(),
        )
        wave, _ = model.vocoder.vocode_chunk(mel_w, model.vocoder.new_state())
        parts.append(wave[len(wave) - (end - start) * hop :])
    logger.debug("context_conversion_finished", frames=frames, context_frames=context)
    return PcmAudio(source.sample_rate, np.concatenate(parts)[:total])
