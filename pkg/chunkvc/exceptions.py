"""Custom exception hierarchy for chunkvc."""


class ChunkVCError(Exception):
    """Base exception for chunkvc."""


class ConfigError(ChunkVCError):
    """Raised when configuration is invalid or cannot be loaded."""


class ShapeError(ChunkVCError, ValueError):
    """Raised when tensor channels, frames or dimensions disagree."""


class AudioFormatError(ChunkVCError):
    """Raised when a WAV file cannot be used as 16 kHz mono 16-bit PCM."""


class WavFormatError(AudioFormatError):
    """Not a RIFF/WAVE file, or not 16-bit PCM."""


class SampleRateError(AudioFormatError):
    """Audio is not at the expected sample rate."""


class ChannelCountError(AudioFormatError):
    """Audio is not mono."""


class WavTruncatedError(AudioFormatError):
    """The file is shorter than its RIFF header declares."""


class StreamStateError(ChunkVCError):
    """Raised when a streaming session or state is used out of order."""


class ReferenceTooShortError(ChunkVCError):
    """Raised when the reference utterance yields fewer than two style tokens."""


class ModelFileError(ChunkVCError):
    """Raised when a .cnvc container cannot be read or is inconsistent."""


class MagicMismatchError(ModelFileError):
    """The file does not start with the container magic."""


class VersionMismatchError(ModelFileError):
    """The container version is not supported."""


class ContainerTruncatedError(ModelFileError):
    """The container ends before its declared contents."""


class DuplicateTensorError(ModelFileError):
    """A tensor name appears more than once."""


class TensorShapeError(ModelFileError):
    """A tensor's shape disagrees with its payload or with the config."""


class MissingTensorError(ModelFileError):
    """A tensor required by the config is absent."""


class LatencyError(ChunkVCError):
    """Raised for invalid latency inputs or reports without processed chunks."""
