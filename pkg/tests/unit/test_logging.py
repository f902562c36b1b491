"""Tests for chunkvc.utils.logging."""

import json
import logging

from chunkvc.config.schema import LoggingConfig, ObservabilityConfig
from chunkvc.utils.logging import setup_logging


def test_json_logging_writes_file(tmp_path):
    path = tmp_path / "chunkvc.log"
    config = ObservabilityConfig(
        logging=LoggingConfig(level="INFO", format="json", file=str(path))
    )
    logger = setup_logging(config)
    logger.info("chunk_processed", chunk_index=3)
    for handler in logging.getLogger().handlers:
        handler.flush()
    record = json.loads(path.read_text(encoding="utf-8").strip().splitlines()[-1])
    assert record["event"] == "chunk_processed"
    assert record["chunk_index"] == 3
    assert record["level"] == "info"


def test_level_filters_debug(tmp_path):
    path = tmp_path / "quiet.log"
    config = ObservabilityConfig(
        logging=LoggingConfig(level="WARNING", format="json", file=str(path))
    )
    logger = setup_logging(config)
    logger.debug("hidden")
    logger.warning("shown")
    for handler in logging.getLogger().handlers:
        handler.flush()
    text = path.read_text(encoding="utf-8")
    assert "hidden" not in text
    assert "shown" in text
