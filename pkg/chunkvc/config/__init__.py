"""Configuration module exports."""

from chunkvc.config.loader import ConfigLoader, dump_config_document
from chunkvc.config.profiles import PROFILES, preset_config, with_setting
from chunkvc.config.schema import (
    DecoderConfig,
    ExtractorConfig,
    MelConfig,
    ModelConfig,
    ObservabilityConfig,
    SessionConfig,
    StyleConfig,
    VocoderConfig,
)
from chunkvc.config.validators import validate_config

__all__ = [
    "ConfigLoader",
    "DecoderConfig",
    "ExtractorConfig",
    "MelConfig",
    "ModelConfig",
    "ObservabilityConfig",
    "PROFILES",
    "SessionConfig",
    "StyleConfig",
    "VocoderConfig",
    "dump_config_document",
    "preset_config",
    "validate_config",
    "with_setting",
]
