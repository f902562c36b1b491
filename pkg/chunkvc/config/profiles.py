"""Predefined streaming presets."""

from __future__ import annotations

import copy
from typing import Any

from chunkvc.config.schema import ModelConfig
from chunkvc.exceptions import ConfigError

PROFILES: dict[str, dict[str, Any]] = {
    "full": {
        "description": "80 ms chunks, 6-layer extractor, 2 right-context chunks",
        "extractor": {
            "layers": 6,
            "chunk_frames": 4,
            "right_context_chunks": 2,
        },
        "session": {
            "setting": "full",
            "chunk_ms": 80,
            "right_context_chunks": 2,
        },
    },
    "fast": {
        "description": "20 ms chunks, 3-layer extractor, strictly causal",
        "extractor": {
            "layers": 3,
            "chunk_frames": 1,
            "right_context_chunks": 0,
        },
        "session": {
            "setting": "fast",
            "chunk_ms": 20,
            "right_context_chunks": 0,
        },
    },
}


def _merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def apply_profile(data: dict[str, Any], name: str) -> dict[str, Any]:
    """Overlay a preset's extractor/session values onto a config mapping."""
    if name not in PROFILES:
        raise ConfigError(f"Unknown setting: {name}")
    overlay = {key: value for key, value in PROFILES[name].items() if key != "description"}
    return _merge(data, overlay)


def preset_config(name: str, **overrides: Any) -> ModelConfig:
    """Build a default ModelConfig for the named setting."""
    data = apply_profile({}, name)
    if overrides:
        data = _merge(data, overrides)
    return ModelConfig.model_validate(data)


def with_setting(config: ModelConfig, name: str, chunk_ms: int | None = None) -> ModelConfig:
    """Switch the streaming schedule of an existing model; its architecture is kept.

    Only chunking and right context change, so weights saved for ``config`` still fit.
    """
    if name not in PROFILES:
        raise ConfigError(f"Unknown setting: {name}")
    profile = PROFILES[name]
    overlay = {
        "session": profile["session"],
        "extractor": {
            key: profile["extractor"][key] for key in ("chunk_frames", "right_context_chunks")
        },
    }
    data = _merge(config.model_dump(mode="python"), overlay)
    if chunk_ms is not None:
        data["session"]["chunk_ms"] = chunk_ms
        if chunk_ms % 20 == 0:
            data["extractor"]["chunk_frames"] = chunk_ms // 20
    return ModelConfig.model_validate(data)
