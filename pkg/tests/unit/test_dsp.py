"""Tests for chunkvc.dsp (WAV I/O and causal mel analysis)."""

import math
import struct

import numpy as np
import pytest
import soundfile as sf

from chunkvc.config import MelConfig
from chunkvc.dsp import (
    MelStream,
    PcmAudio,
    load_wav,
    mel_center_frequencies,
    mel_filterbank,
    mel_spectrogram,
    write_wav,
)
from chunkvc.exceptions import (
    ChannelCountError,
    SampleRateError,
    WavFormatError,
    WavTruncatedError,
)
from tests.helpers import noise, sine

# ---------------------------------------------------------------------------
# WAV I/O
# ---------------------------------------------------------------------------


def test_silence_round_trip(tmp_path):
    path = tmp_path / "silence.wav"
    write_wav(PcmAudio(samples=np.zeros(16000, np.float32)), path)
    loaded = load_wav(path)
    assert loaded.sample_rate == 16000
    assert len(loaded) == 16000
    assert not np.any(loaded.samples)


def test_sample_scaling(tmp_path):
    path = tmp_path / "half.wav"
    sf.write(str(path), np.array([16384, -32768], dtype=np.int16), 16000, subtype="PCM_16")
    np.testing.assert_array_equal(load_wav(path).samples, [0.5, -1.0])


def test_write_clamps_to_full_scale(tmp_path):
    path = tmp_path / "loud.wav"
    write_wav(PcmAudio(samples=np.array([1.0, 2.0, -3.0], np.float32)), path)
    data, _ = sf.read(str(path), dtype="int16")
    np.testing.assert_array_equal(data, [32767, 32767, -32768])


def test_round_trip_within_one_lsb(tmp_path):
    path = tmp_path / "noise.wav"
    audio = noise(4000, seed=3, scale=0.3)
    write_wav(audio, path)
    loaded = load_wav(path)
    assert np.max(np.abs(loaded.samples - np.clip(audio.samples, -1, 1))) <= 1 / 32768


def test_wrong_rate_rejected(tmp_path):
    path = tmp_path / "rate.wav"
    sf.write(str(path), np.zeros(100, np.int16), 22050, subtype="PCM_16")
    with pytest.raises(SampleRateError):
        load_wav(path)


def test_stereo_rejected(tmp_path):
    path = tmp_path / "stereo.wav"
    sf.write(str(path), np.zeros((100, 2), np.int16), 16000, subtype="PCM_16")
    with pytest.raises(ChannelCountError):
        load_wav(path)


def test_float_subtype_rejected(tmp_path):
    path = tmp_path / "float.wav"
    sf.write(str(path), np.zeros(100, np.float32), 16000, subtype="FLOAT")
    with pytest.raises(WavFormatError):
        load_wav(path)


def test_not_riff_rejected(tmp_path):
    path = tmp_path / "junk.wav"
    path.write_bytes(b"this is not a wave file at all")
    with pytest.raises(WavFormatError):
        load_wav(path)


def test_truncated_file_rejected(tmp_path):
    path = tmp_path / "cut.wav"
    write_wav(PcmAudio(samples=np.zeros(1000, np.float32)), path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) - 500])
    with pytest.raises(WavTruncatedError):
        load_wav(path)


def test_truncated_header_rejected(tmp_path):
    path = tmp_path / "stub.wav"
    path.write_bytes(b"RIFF" + struct.pack("<I", 36)[:2])
    with pytest.raises(WavTruncatedError):
        load_wav(path)


def test_pcm_audio_must_be_mono():
    with pytest.raises(ChannelCountError):
        PcmAudio(samples=np.zeros((2, 10), np.float32))


# ---------------------------------------------------------------------------
# Mel analysis
# ---------------------------------------------------------------------------


def test_silence_hits_log_floor():
    cfg = MelConfig()
    mel = mel_spectrogram(PcmAudio(samples=np.zeros(16000, np.float32)), cfg)
    assert mel.shape == (80, 50)
    np.testing.assert_array_equal(mel, np.float32(math.log(1e-5)))


def test_short_input_has_no_frames():
    short = PcmAudio(samples=np.zeros(319, np.float32))
    assert mel_spectrogram(short, MelConfig()).shape == (80, 0)
    assert mel_spectrogram(PcmAudio.empty(), MelConfig()).shape == (80, 0)


@pytest.mark.parametrize("samples", range(0, 3201, 160))
def test_frame_count_is_floor(samples):
    mel = mel_spectrogram(noise(samples, seed=samples), MelConfig())
    assert mel.shape[1] == samples // 320


def test_sine_peaks_in_nearest_band():
    cfg = MelConfig()
    mel = mel_spectrogram(sine(16000, 440.0), cfg)
    assert mel.shape == (80, 50)
    centers = mel_center_frequencies(cfg)
    nearest = int(np.argmin(np.abs(centers - 440.0)))
    # the first frames still see the zero history before the tone
    peaks = np.argmax(mel[:, 4:], axis=0)
    assert np.all(peaks == nearest)


def test_appending_samples_keeps_earlier_frames():
    cfg = MelConfig()
    audio = noise(5000, seed=9)
    short = mel_spectrogram(PcmAudio(samples=audio.samples[:2000]), cfg)
    longer = mel_spectrogram(audio, cfg)
    np.testing.assert_array_equal(longer[:, : short.shape[1]], short)


def test_stream_matches_batch_for_any_partition():
    cfg = MelConfig()
    audio = noise(7000, seed=4)
    stream = MelStream(cfg)
    rng = np.random.default_rng(0)
    pieces, start = [], 0
    while start < len(audio):
        step = int(rng.integers(1, 900))
        pieces.append(stream.push(audio.samples[start : start + step]))
        start += step
    np.testing.assert_array_equal(np.concatenate(pieces, axis=1), mel_spectrogram(audio, cfg))
    assert stream.pending_samples == 7000 % 320


def test_filterbank_covers_every_bin_in_range():
    cfg = MelConfig()
    basis = mel_filterbank(cfg)
    assert basis.shape == (80, 513)
    assert np.all(basis >= 0)
    freqs = np.arange(513) * cfg.sample_rate / cfg.win
    inside = (freqs > cfg.f_min) & (freqs < cfg.f_max)
    assert np.all(basis[:, inside].sum(axis=0) > 0)


def test_wrong_rate_audio_rejected():
    with pytest.raises(SampleRateError):
        mel_spectrogram(PcmAudio(sample_rate=8000, samples=np.zeros(800, np.float32)), MelConfig())
