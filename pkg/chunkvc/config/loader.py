"""Configuration loader and validation utilities."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from chunkvc.config.schema import ModelConfig
from chunkvc.config.validators import validate_config
from chunkvc.exceptions import ConfigError


def flatten_config(data: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in data.items():
        path = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten_config(value, prefix=f"{path}."))
        else:
            flat[path] = value
    return flat


def unflatten_config(flat: dict[str, Any]) -> dict[str, Any]:
    nested: dict[str, Any] = {}
    for path, value in flat.items():
        node = nested
        parts = str(path).split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"Conflicting config key: {path}")
            node = child
        node[parts[-1]] = value
    return nested


def dump_config_document(config: ModelConfig) -> str:
    """Serialize a config as flat ``dotted.key: value`` YAML lines, sorted by key."""
    flat = flatten_config(config.model_dump(mode="json"))
    lines = []
    for key in sorted(flat):
        rendered = yaml.safe_dump(
            flat[key], default_flow_style=True, allow_unicode=True, width=10_000
        ).strip()
        if rendered.endswith("\n..."):
            rendered = rendered[: -len("\n...")]
        elif rendered.endswith("..."):
            rendered = rendered[: -len("...")].strip()
        lines.append(f"{key}: {rendered}")
    return "\n".join(lines) + "\n"


class ConfigLoader:
    """Load and validate YAML configuration files."""

    def load(self, path: Path) -> ModelConfig:
        data = self._read_yaml(path)
        return self.from_mapping(data)

    def loads(self, text: str) -> ModelConfig:
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"Invalid YAML: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("Config root must be a YAML mapping")
        return self.from_mapping(data)

    def from_mapping(self, data: dict[str, Any]) -> ModelConfig:
        if any("." in str(key) for key in data):
            data = unflatten_config(data)
        try:
            config = ModelConfig.model_validate(data)
        except ValidationError as exc:
            raise ConfigError(f"Invalid configuration:\n{exc}") from exc
        self._raise_if_errors(config)
        return config

    def validate(self, config: ModelConfig) -> list[str]:
        return validate_config(config)

    def ensure_valid(self, config: ModelConfig) -> ModelConfig:
        """Return ``config`` unchanged or raise ConfigError listing every violation."""
        self._raise_if_errors(config)
        return config

    def _raise_if_errors(self, config: ModelConfig) -> None:
        errors = self.validate(config)
        if errors:
            message = "Invalid configuration:\n- " + "\n- ".join(errors)
            raise ConfigError(message)

    def _read_yaml(self, path: Path) -> dict[str, Any]:
        if not Path(path).exists():
            raise ConfigError(f"Config file not found: {path}")
        try:
            with Path(path).open("r", encoding="utf-8") as handle:
                data = yaml.safe_load(handle) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"Invalid YAML: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("Config root must be a YAML mapping")
        return data
