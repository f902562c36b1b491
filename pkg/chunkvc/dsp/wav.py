"""16 kHz mono 16-bit PCM WAV I/O."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import numpy.typing as npt
import soundfile as sf

from chunkvc.exceptions import (
    AudioFormatError,
    ChannelCountError,
    SampleRateError,
    WavFormatError,
    WavTruncatedError,
)

SAMPLE_RATE = 16000
PCM_SCALE = 32768.0

Samples = npt.NDArray[np.float32]


@dataclass
class PcmAudio:
    sample_rate: int = SAMPLE_RATE
    samples: Samples = field(default_factory=lambda: np.zeros(0, dtype=np.float32))

    def __post_init__(self) -> None:
        self.samples = np.ascontiguousarray(np.asarray(self.samples, dtype=np.float32))
        if self.samples.ndim != 1:
            raise ChannelCountError("PcmAudio must be mono (1-D samples)")
        if not np.all(np.isfinite(self.samples)):
            raise AudioFormatError("PcmAudio samples must be finite")

    @property
    def duration_ms(self) -> float:
        return 1000.0 * len(self.samples) / self.sample_rate

    def __len__(self) -> int:
        return len(self.samples)

    @classmethod
    def empty(cls, sample_rate: int = SAMPLE_RATE) -> PcmAudio:
        return cls(sample_rate=sample_rate)

    @classmethod
    def concat(cls, parts: list[PcmAudio], sample_rate: int = SAMPLE_RATE) -> PcmAudio:
        if not parts:
            return cls.empty(sample_rate)
        return cls(sample_rate=sample_rate, samples=np.concatenate([p.samples for p in parts]))


def _check_riff_header(path: Path) -> None:
    size = path.stat().st_size
    with path.open("rb") as handle:
        header = handle.read(12)
    if len(header) < 12:
        if b"RIFF".startswith(header[:4]):
            raise WavTruncatedError(f"{path}: file ends inside the RIFF header")
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")
    riff, declared, wave = struct.unpack("<4sI4s", header)
    if riff != b"RIFF" or wave != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")
    if declared + 8 > size:
        raise WavTruncatedError(f"{path}: header declares {declared + 8} bytes, file has {size}")


def load_wav(path: Path | str) -> PcmAudio:
    """Read a 16 kHz mono 16-bit PCM WAV; samples are scaled by 1/32768."""
    path = Path(path)
    _check_riff_header(path)
    try:
        info = sf.info(str(path))
    except RuntimeError as exc:
        raise WavFormatError(f"{path}: unreadable WAV ({exc})") from exc
    if info.format != "WAV" or info.subtype != "PCM_16":
        raise WavFormatError(f"{path}: expected WAV PCM_16, got {info.format} {info.subtype}")
    if info.channels != 1:
        raise ChannelCountError(f"{path}: expected mono, got {info.channels} channels")
    if info.samplerate != SAMPLE_RATE:
        raise SampleRateError(f"{path}: expected {SAMPLE_RATE} Hz, got {info.samplerate}")
    try:
        data, _ = sf.read(str(path), dtype="int16", always_2d=False)
    except RuntimeError as exc:
        raise WavTruncatedError(f"{path}: could not read sample data ({exc})") from exc
    samples = np.asarray(data, dtype=np.float32) / np.float32(PCM_SCALE)
    return PcmAudio(sample_rate=SAMPLE_RATE, samples=samples)


def quantize_pcm16(samples: npt.ArrayLike) -> npt.NDArray[np.int16]:
    clipped = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    return np.clip(np.round(clipped * PCM_SCALE), -32768, 32767).astype(np.int16)


def write_wav(pcm: PcmAudio, path: Path | str) -> None:
    """Write 16-bit PCM mono 16 kHz; values are clamped to [-1, 1] first."""
    if pcm.sample_rate != SAMPLE_RATE:
        raise SampleRateError(f"expected {SAMPLE_RATE} Hz, got {pcm.sample_rate}")
    try:
        sf.write(
            str(path), quantize_pcm16(pcm.samples), SAMPLE_RATE, subtype="PCM_16", format="WAV"
        )
    except RuntimeError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
