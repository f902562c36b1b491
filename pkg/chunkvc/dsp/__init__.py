"""Audio I/O and causal mel analysis."""

from chunkvc.dsp.mel import MelStream, mel_center_frequencies, mel_filterbank, mel_spectrogram
from chunkvc.dsp.wav import PcmAudio, load_wav, write_wav

__all__ = [
    "MelStream",
    "PcmAudio",
    "load_wav",
    "mel_center_frequencies",
    "mel_filterbank",
    "mel_spectrogram",
    "write_wav",
]
