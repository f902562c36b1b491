"""Softmax and scaled dot-product attention."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from chunkvc.exceptions import ShapeError
from chunkvc.kernels.types import ACC_DTYPE, DTYPE, Tensor2D


def softmax(values: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Numerically stable softmax of a 1-D vector (max-subtracted, float64)."""
    vector = np.asarray(values, dtype=ACC_DTYPE)
    if vector.ndim != 1:
        raise ShapeError("softmax expects a vector")
    if vector.size == 0:
        raise ShapeError("softmax of an empty vector")
    shifted = np.exp(vector - vector.max())
    return shifted / shifted.sum()


def softmax_rows(scores: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Row-wise softmax of a (queries, keys) score matrix."""
    if scores.shape[-1] == 0:
        raise ShapeError("softmax over an empty key set")
    shifted = np.exp(scores - scores.max(axis=-1, keepdims=True))
    return shifted / shifted.sum(axis=-1, keepdims=True)


def attention_weights(q: Tensor2D, k: Tensor2D) -> npt.NDArray[np.float64]:
    """Softmax(QᵀK / √d) with shape (queries, keys)."""
    if q.shape[0] != k.shape[0]:
        raise ShapeError(f"query dim {q.shape[0]} ≠ key dim {k.shape[0]}")
    if k.shape[1] == 0:
        raise ShapeError("attention over an empty key set")
    scale = 1.0 / np.sqrt(q.shape[0])
    scores = (q.T.astype(ACC_DTYPE) @ k.astype(ACC_DTYPE)) * scale
    return softmax_rows(scores)


def scaled_dot_attention(q: Tensor2D, k: Tensor2D, v: Tensor2D) -> Tensor2D:
    """out[:, i] = Σ_j softmax(QᵀK/√d)[i, j] · V[:, j]."""
    if k.shape[1] != v.shape[1]:
        raise ShapeError(f"keys ({k.shape[1]}) and values ({v.shape[1]}) differ in frames")
    probs = attention_weights(q, k)
    return (v.astype(ACC_DTYPE) @ probs.T).astype(DTYPE)


def multi_head_attention(q: Tensor2D, k: Tensor2D, v: Tensor2D, heads: int) -> Tensor2D:
    """Split channels into ``heads`` groups, attend per group, concatenate."""
    d_model = q.shape[0]
    if d_model % heads != 0 or k.shape[0] != d_model or v.shape[0] != d_model:
        raise ShapeError(f"d_model {d_model} incompatible with {heads} heads")
    d_head = d_model // heads
    outputs = [
        scaled_dot_attention(
            q[h * d_head : (h + 1) * d_head],
            k[h * d_head : (h + 1) * d_head],
            v[h * d_head : (h + 1) * d_head],
        )
        for h in range(heads)
    ]
    return np.concatenate(outputs, axis=0)
