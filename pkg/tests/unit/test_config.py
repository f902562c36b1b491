"""Tests for chunkvc.config."""

from pathlib import Path

import pytest

from chunkvc.config import (
    PROFILES,
    ConfigLoader,
    ModelConfig,
    dump_config_document,
    preset_config,
    validate_config,
    with_setting,
)
from chunkvc.exceptions import ConfigError

TEMPLATES = Path(__file__).resolve().parents[2] / "templates"


def test_default_config_is_valid():
    assert validate_config(ModelConfig()) == []
    for name in PROFILES:
        assert validate_config(preset_config(name)) == []


def test_upsample_product_must_match_hop():
    cfg = preset_config("full", vocoder={"upsample_factors": [8, 8, 2, 2]})
    assert "vocoder.upsample_factors: product 256 ≠ hop 320" in validate_config(cfg)


def test_chunk_must_be_whole_frames():
    cfg = preset_config("full", session={"chunk_ms": 30})
    assert "session.chunk_ms: 30 not multiple of 20" in validate_config(cfg)


def test_session_and_extractor_must_agree():
    cfg = preset_config("full", extractor={"chunk_frames": 2})
    errors = validate_config(cfg)
    assert any(error.startswith("extractor.chunk_frames") for error in errors)
    cfg = preset_config("full", extractor={"right_context_chunks": 1})
    assert any("right_context_chunks" in error for error in validate_config(cfg))


def test_other_violations_reported():
    cfg = preset_config(
        "full",
        mel={"hop": 160},
        extractor={"heads": 3},
        style={"codebook_size": 1},
        vocoder={"pre_kernel": 4},
    )
    errors = validate_config(cfg)
    assert any(error.startswith("mel.hop") for error in errors)
    assert any(error.startswith("extractor.d_model") for error in errors)
    assert any(error.startswith("style.codebook_size") for error in errors)
    assert "vocoder: all kernels must be odd" in errors


@pytest.mark.parametrize("name", ["full", "fast"])
def test_templates_load(name):
    cfg = ConfigLoader().load(TEMPLATES / f"{name}.yaml")
    assert cfg.session.setting == name
    assert cfg.session.chunk_ms == (80 if name == "full" else 20)


def test_full_template_matches_preset():
    assert ConfigLoader().load(TEMPLATES / "full.yaml") == preset_config("full")


def test_loader_errors(tmp_path):
    loader = ConfigLoader()
    with pytest.raises(ConfigError):
        loader.load(tmp_path / "missing.yaml")
    with pytest.raises(ConfigError):
        loader.loads("- just\n- a list\n")
    with pytest.raises(ConfigError):
        loader.loads("mel: [unclosed\n")
    with pytest.raises(ConfigError):
        loader.loads("mel:\n  unknown_field: 1\n")
    with pytest.raises(ConfigError):
        loader.loads("session:\n  chunk_ms: 30\n")


def test_flat_document_round_trip():
    cfg = preset_config("fast", style={"enabled": False})
    document = dump_config_document(cfg)
    assert "session.chunk_ms: 20" in document.splitlines()
    assert ConfigLoader().loads(document) == cfg


def test_with_setting_keeps_architecture():
    full = preset_config("full")
    fast = with_setting(full, "fast")
    assert fast.session.chunk_ms == 20
    assert fast.extractor.chunk_frames == 1
    assert fast.extractor.right_context_chunks == 0
    assert fast.extractor.layers == full.extractor.layers
    assert validate_config(fast) == []


def test_with_setting_chunk_override():
    cfg = with_setting(preset_config("full"), "full", chunk_ms=160)
    assert cfg.extractor.chunk_frames == 8
    assert validate_config(cfg) == []
    odd = with_setting(preset_config("full"), "full", chunk_ms=30)
    assert "session.chunk_ms: 30 not multiple of 20" in validate_config(odd)


def test_unknown_setting():
    with pytest.raises(ConfigError):
        preset_config("turbo")
    with pytest.raises(ConfigError):
        with_setting(preset_config("full"), "turbo")


def test_effective_right_context():
    cfg = preset_config("full")
    assert cfg.session.effective_right_context_ms == 160.0
    explicit = preset_config("full", session={"right_context_ms": 40.0})
    assert explicit.session.effective_right_context_ms == 40.0
