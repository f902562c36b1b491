"""Reindexing, pooling and per-frame affine primitives."""

from __future__ import annotations

import numpy as np

from chunkvc.exceptions import ShapeError
from chunkvc.kernels.types import ACC_DTYPE, DTYPE, Array, Tensor2D


def pixel_shuffle(x: Tensor2D, r: int) -> Tensor2D:
    """(r·C, T) → (C, r·T) with out[c, t·r + j] = x[c·r + j, t]."""
    if r < 1 or x.shape[0] % r != 0:
        raise ShapeError(f"{x.shape[0]} channels not divisible by factor {r}")
    channels, frames = x.shape[0] // r, x.shape[1]
    return np.ascontiguousarray(
        x.reshape(channels, r, frames).transpose(0, 2, 1).reshape(channels, frames * r)
    )


def pixel_unshuffle(y: Tensor2D, r: int) -> Tensor2D:
    """Inverse of :func:`pixel_shuffle`."""
    if r < 1 or y.shape[1] % r != 0:
        raise ShapeError(f"{y.shape[1]} frames not divisible by factor {r}")
    channels, frames = y.shape[0], y.shape[1] // r
    return np.ascontiguousarray(
        y.reshape(channels, frames, r).transpose(0, 2, 1).reshape(channels * r, frames)
    )


def zero_stuff(x: Tensor2D, r: int) -> Tensor2D:
    """(C, T) → (C, r·T): each frame followed by r − 1 zero frames."""
    if r < 1:
        raise ShapeError(f"upsample factor must be >= 1, got {r}")
    out = np.zeros((x.shape[0], x.shape[1] * r), dtype=DTYPE)
    out[:, ::r] = x
    return out


def mean_pool_time(x: Tensor2D, stride: int) -> Tensor2D:
    """Average non-overlapping windows of ``stride`` frames; the last may be partial."""
    if stride < 1:
        raise ShapeError("stride must be >= 1")
    channels, frames = x.shape
    windows = -(-frames // stride)
    out = np.empty((channels, windows), dtype=DTYPE)
    wide = x.astype(ACC_DTYPE)
    for w in range(windows):
        block = wide[:, w * stride : min((w + 1) * stride, frames)]
        out[:, w] = (block.sum(axis=1) / block.shape[1]).astype(DTYPE)
    return out


def linear(x: Tensor2D, weight: Array, bias: Array | None = None) -> Tensor2D:
    """Per-frame affine map: W (out, in) @ x (in, T) + b."""
    if weight.ndim != 2 or weight.shape[1] != x.shape[0]:
        raise ShapeError(f"linear weight {weight.shape} incompatible with {x.shape[0]} inputs")
    acc = np.asarray(weight, dtype=ACC_DTYPE) @ x.astype(ACC_DTYPE)
    if bias is not None:
        if bias.shape != (weight.shape[0],):
            raise ShapeError(f"linear bias {bias.shape} ≠ ({weight.shape[0]},)")
        acc += np.asarray(bias, dtype=ACC_DTYPE)[:, np.newaxis]
    return acc.astype(DTYPE)


def leaky_relu(x: Tensor2D, slope: float) -> Tensor2D:
    return np.where(x >= 0, x, x * DTYPE(slope)).astype(DTYPE)


def relu(x: Tensor2D) -> Tensor2D:
    return np.maximum(x, DTYPE(0))


def gated(x: Tensor2D) -> Tensor2D:
    """tanh(first half) · sigmoid(second half) along channels."""
    half = x.shape[0] // 2
    a = x[:half].astype(ACC_DTYPE)
    b = x[half:].astype(ACC_DTYPE)
    return (np.tanh(a) / (1.0 + np.exp(-b))).astype(DTYPE)


def layer_norm(x: Tensor2D, gain: Array, bias: Array, eps: float = 1e-5) -> Tensor2D:
    """Normalise each frame over channels."""
    wide = x.astype(ACC_DTYPE)
    mean = wide.mean(axis=0, keepdims=True)
    var = ((wide - mean) ** 2).mean(axis=0, keepdims=True)
    normed = (wide - mean) / np.sqrt(var + eps)
    scaled = normed * np.asarray(gain, dtype=ACC_DTYPE)[:, np.newaxis]
    return (scaled + np.asarray(bias, dtype=ACC_DTYPE)[:, np.newaxis]).astype(DTYPE)


def argmax_frames(logits: Tensor2D) -> np.ndarray:
    """Index of the largest channel per frame; ties resolve to the smallest index."""
    return np.argmax(logits, axis=0).astype(np.int64)
