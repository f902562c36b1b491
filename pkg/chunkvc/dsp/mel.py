"""Causal log-mel analysis.

Frame ``t`` ends at sample ``(t + 1) * hop`` and looks back ``win`` samples, with the
missing history before the stream start read as zeros. No frame ever reads a sample
beyond its own end, so appending audio never changes frames already emitted.
"""

from __future__ import annotations

from functools import lru_cache

import librosa
import numpy as np
import numpy.typing as npt

from chunkvc.config.schema import MelConfig
from chunkvc.dsp.wav import PcmAudio, Samples
from chunkvc.exceptions import SampleRateError
from chunkvc.kernels.types import DTYPE, Tensor2D


@lru_cache(maxsize=8)
def _filterbank(
    sample_rate: int, win: int, n_mels: int, f_min: float, f_max: float
) -> npt.NDArray[np.float64]:
    basis = librosa.filters.mel(
        sr=sample_rate,
        n_fft=win,
        n_mels=n_mels,
        fmin=f_min,
        fmax=f_max,
        htk=False,
        norm=None,
        dtype=np.float64,
    )
    basis.setflags(write=False)
    return basis


@lru_cache(maxsize=8)
def _window(win: int) -> npt.NDArray[np.float64]:
    window = np.asarray(librosa.filters.get_window("hann", win, fftbins=True), dtype=np.float64)
    window.setflags(write=False)
    return window


def mel_filterbank(cfg: MelConfig) -> npt.NDArray[np.float64]:
    """Slaney-scale triangular filters with unit peak, shape (n_mels, win // 2 + 1)."""
    return _filterbank(cfg.sample_rate, cfg.win, cfg.n_mels, cfg.f_min, cfg.f_max)


def mel_center_frequencies(cfg: MelConfig) -> npt.NDArray[np.float64]:
    edges = librosa.mel_frequencies(cfg.n_mels + 2, fmin=cfg.f_min, fmax=cfg.f_max, htk=False)
    return np.asarray(edges[1:-1], dtype=np.float64)


def history_samples(cfg: MelConfig) -> int:
    return cfg.win - cfg.hop


def frames_from_padded(padded: Samples, n_frames: int, cfg: MelConfig) -> Tensor2D:
    """Analyse ``n_frames`` frames from a buffer that starts with ``win - hop`` history."""
    if n_frames <= 0:
        return np.zeros((cfg.n_mels, 0), dtype=DTYPE)
    needed = history_samples(cfg) + n_frames * cfg.hop
    if len(padded) < needed:
        raise ValueError(f"need {needed} samples for {n_frames} frames, got {len(padded)}")
    view = np.lib.stride_tricks.sliding_window_view(padded[:needed], cfg.win)[:: cfg.hop]
    window = _window(cfg.win)
    basis = mel_filterbank(cfg)
    out = np.empty((cfg.n_mels, n_frames), dtype=DTYPE)
    # frame by frame, so a frame never depends on how many were analysed with it
    for t in range(n_frames):
        spectrum = np.fft.rfft(view[t].astype(np.float64) * window, n=cfg.win)
        power = spectrum.real**2 + spectrum.imag**2
        out[:, t] = np.log(np.maximum(basis @ power, cfg.log_floor))
    return out


def mel_spectrogram(pcm: PcmAudio, cfg: MelConfig) -> Tensor2D:
    """(n_mels, floor(len / hop)) natural-log mel power, causal framing."""
    if pcm.sample_rate != cfg.sample_rate:
        raise SampleRateError(f"expected {cfg.sample_rate} Hz, got {pcm.sample_rate}")
    n_frames = len(pcm.samples) // cfg.hop
    padded = np.concatenate(
        [np.zeros(history_samples(cfg), dtype=np.float32), pcm.samples[: n_frames * cfg.hop]]
    )
    return frames_from_padded(padded, n_frames, cfg)


class MelStream:
    """Incremental mel analysis over a growing sample stream."""

    def __init__(self, cfg: MelConfig) -> None:
        self.cfg = cfg
        self._history = np.zeros(history_samples(cfg), dtype=np.float32)
        self._pending = np.zeros(0, dtype=np.float32)

    def push(self, samples: Samples) -> Tensor2D:
        """Append samples; return the frames completed by them."""
        self._pending = np.concatenate([self._pending, np.asarray(samples, dtype=np.float32)])
        n_frames = len(self._pending) // self.cfg.hop
        if n_frames == 0:
            return np.zeros((self.cfg.n_mels, 0), dtype=DTYPE)
        used = n_frames * self.cfg.hop
        padded = np.concatenate([self._history, self._pending[:used]])
        frames = frames_from_padded(padded, n_frames, self.cfg)
        keep = history_samples(self.cfg)
        self._history = padded[len(padded) - keep :] if keep else padded[:0]
        self._pending = self._pending[used:]
        return frames

    @property
    def pending_samples(self) -> int:
        return len(self._pending)
