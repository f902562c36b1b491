"""Binary ``.cnvc`` weight container.

Layout (all integers little-endian)::

    b"CNVC" | u32 version | u32 n + n bytes UTF-8 config document | u32 tensor count
    per tensor: u16 n + n bytes name | u8 rank | u32 dim * rank | float32 payload

The config document is the flat ``dotted.key: value`` text of
:func:`chunkvc.config.loader.dump_config_document`.
"""

from __future__ import annotations

import math
import os
import struct
from pathlib import Path

import numpy as np
import structlog

from chunkvc.config.loader import ConfigLoader, dump_config_document
from chunkvc.config.schema import ModelConfig
from chunkvc.exceptions import (
    ConfigError,
    ContainerTruncatedError,
    DuplicateTensorError,
    MagicMismatchError,
    MissingTensorError,
    ModelFileError,
    TensorShapeError,
    VersionMismatchError,
)
from chunkvc.model_io.shapes import weight_table
from chunkvc.models import ModelWeights

logger = structlog.get_logger()

MAGIC = b"CNVC"
FORMAT_VERSION = 1
_F32 = np.dtype("<f4")


def check_weights(cfg: ModelConfig, weights: ModelWeights) -> None:
    """Names, shapes and finiteness of ``weights`` against the config's table."""
    table = weight_table(cfg)
    missing = [name for name in table if name not in weights]
    if missing:
        raise MissingTensorError(f"missing tensors: {', '.join(missing[:5])}")
    extra = [name for name in weights if name not in table]
    if extra:
        raise TensorShapeError(f"tensors not used by this config: {', '.join(extra[:5])}")
    for name, shape in table.items():
        tensor = weights[name]
        if tuple(tensor.shape) != shape:
            raise TensorShapeError(f"{name}: shape {tuple(tensor.shape)} ≠ expected {shape}")
        if not np.all(np.isfinite(tensor)):
            raise TensorShapeError(f"{name}: non-finite values")
    weights.reset_audit()


def encode_model(cfg: ModelConfig, weights: ModelWeights) -> bytes:
    check_weights(cfg, weights)
    document = dump_config_document(cfg).encode("utf-8")
    parts = [MAGIC, struct.pack("<II", FORMAT_VERSION, len(document)), document]
    parts.append(struct.pack("<I", len(weights)))
    for name in weights:
        tensor = weights[name]
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)) + encoded)
        parts.append(struct.pack(f"<B{tensor.ndim}I", tensor.ndim, *tensor.shape))
        parts.append(np.ascontiguousarray(tensor, dtype=_F32).tobytes())
    weights.reset_audit()
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise ContainerTruncatedError(
                f"container truncated while reading {what} at byte {self.offset}"
            )
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, fmt: str, what: str) -> tuple[int, ...]:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def decode_model(data: bytes) -> tuple[ModelConfig, ModelWeights]:
    reader = _Reader(data)
    if data[: len(MAGIC)] != MAGIC:
        if len(data) < len(MAGIC) and MAGIC.startswith(data):
            raise ContainerTruncatedError("container truncated inside the magic")
        raise MagicMismatchError("not a .cnvc container (bad magic)")
    reader.take(len(MAGIC), "magic")
    (version,) = reader.unpack("<I", "version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"unsupported container version {version}")
    (doc_len,) = reader.unpack("<I", "config length")
    try:
        document = reader.take(doc_len, "config document").decode("utf-8")
        cfg = ConfigLoader().loads(document)
    except (UnicodeDecodeError, ConfigError) as exc:
        raise ModelFileError(f"embedded config is invalid: {exc}") from exc

    (count,) = reader.unpack("<I", "tensor count")
    tensors: dict[str, np.ndarray] = {}
    for index in range(count):
        (name_len,) = reader.unpack("<H", f"tensor {index} name length")
        try:
            name = reader.take(name_len, f"tensor {index} name").decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ModelFileError(f"tensor {index} name is not UTF-8") from exc
        if name in tensors:
            raise DuplicateTensorError(f"duplicate tensor name: {name}")
        (rank,) = reader.unpack("<B", f"{name} rank")
        dims = reader.unpack(f"<{rank}I", f"{name} dims")
        payload = reader.take(math.prod(dims) * _F32.itemsize, f"{name} payload")
        tensors[name] = np.frombuffer(payload, dtype=_F32).reshape(dims).astype(np.float32)
    if reader.offset != len(data):
        raise ModelFileError(f"{len(data) - reader.offset} trailing bytes after last tensor")

    weights = ModelWeights(tensors)
    check_weights(cfg, weights)
    return cfg, weights


def save_model(cfg: ModelConfig, weights: ModelWeights, path: Path) -> None:
    data = encode_model(cfg, weights)
    target = Path(path)
    temp = target.with_name(f".{target.name}.tmp")
    temp.write_bytes(data)
    os.replace(temp, target)
    logger.info("model_saved", path=str(target), tensors=len(weights), bytes=len(data))


def load_model(path: Path) -> tuple[ModelConfig, ModelWeights]:
    target = Path(path)
    data = target.read_bytes()
    cfg, weights = decode_model(data)
    logger.info("model_loaded", path=str(target), tensors=len(weights))
    return cfg, weights
