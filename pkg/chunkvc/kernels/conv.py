"""Causal and centred 1-D convolutions with carried state."""

from __future__ import annotations

import numpy as np

from chunkvc.exceptions import ShapeError
from chunkvc.kernels.types import ACC_DTYPE, DTYPE, Array, ConvSpec, ConvState, Tensor2D


def tap_major(weight: Array) -> Array:
    """``(out, in, kernel)`` weights as a contiguous float64 ``(kernel, out, in)`` stack."""
    return np.ascontiguousarray(np.moveaxis(np.asarray(weight, dtype=ACC_DTYPE), -1, 0))


def _check_weights(spec: ConvSpec, weight: Array, bias: Array | None) -> None:
    if tuple(weight.shape) != spec.weight_shape:
        raise ShapeError(f"conv weight shape {weight.shape} ≠ {spec.weight_shape}")
    if spec.has_bias and (bias is None or bias.shape != (spec.out_channels,)):
        raise ShapeError(f"conv bias must have shape ({spec.out_channels},)")


def _conv_core(
    padded: Tensor2D,
    frames: int,
    taps: Array,
    bias: Array | None,
    dilation: int,
) -> Tensor2D:
    kernel, out_channels, _ = taps.shape
    if frames == 0:
        return np.zeros((out_channels, 0), dtype=DTYPE)
    wide = padded.astype(ACC_DTYPE)
    # each frame sums its per-tap products in tap index order
    acc = taps[0] @ wide[:, :frames]
    partial = np.empty_like(acc)
    for j in range(1, kernel):
        start = j * dilation
        np.matmul(taps[j], wide[:, start : start + frames], out=partial)
        acc += partial
    if bias is not None:
        acc += np.asarray(bias, dtype=ACC_DTYPE)[:, np.newaxis]
    return acc.astype(DTYPE)


def _resolve_taps(spec: ConvSpec, weight: Array, taps: Array | None) -> Array:
    if taps is None:
        return tap_major(weight)
    expected = (spec.kernel, spec.out_channels, spec.in_channels)
    if tuple(taps.shape) != expected:
        raise ShapeError(f"conv taps shape {taps.shape} ≠ {expected}")
    return taps


def causal_conv1d(
    x: Tensor2D,
    spec: ConvSpec,
    weight: Array,
    bias: Array | None,
    state: ConvState,
    *,
    taps: Array | None = None,
) -> tuple[Tensor2D, ConvState]:
    """Left-padded convolution; frame ``t`` reads only inputs ``<= t``.

    Tap ``kernel - 1`` is the current frame, tap 0 the oldest one. ``state`` supplies
    the frames preceding ``x``; a fresh zero state equals left zero-padding. ``taps`` is an
    optional precomputed :func:`tap_major` layout of ``weight``.
    """
    if x.ndim != 2 or x.shape[0] != spec.in_channels:
        raise ShapeError(f"conv input has {x.shape[0]} channels, expected {spec.in_channels}")
    _check_weights(spec, weight, bias)
    history = spec.history
    tail = state.tail
    if tail.shape != (spec.in_channels, history):
        raise ShapeError(f"conv state shape {tail.shape} ≠ {(spec.in_channels, history)}")

    padded = np.concatenate([tail, x.astype(DTYPE, copy=False)], axis=1)
    stack = _resolve_taps(spec, weight, taps)
    out = _conv_core(padded, x.shape[1], stack, bias if spec.has_bias else None, spec.dilation)
    new_tail = padded[:, padded.shape[1] - history :] if history else padded[:, :0]
    return out, ConvState(tail=np.ascontiguousarray(new_tail))


def centered_conv1d(
    x: Tensor2D,
    spec: ConvSpec,
    weight: Array,
    bias: Array | None,
    *,
    taps: Array | None = None,
) -> Tensor2D:
    """Edge-padded convolution reading past and future frames (offline use only).

    The first and last frames are replicated into the padding, so a time-constant input
    yields a time-constant output.
    """
    if x.ndim != 2 or x.shape[0] != spec.in_channels:
        raise ShapeError(f"conv input has {x.shape[0]} channels, expected {spec.in_channels}")
    _check_weights(spec, weight, bias)
    history = spec.history
    left = history // 2
    if x.shape[1] == 0:
        return np.zeros((spec.out_channels, 0), dtype=DTYPE)
    padded = np.pad(x.astype(DTYPE, copy=False), ((0, 0), (left, history - left)), mode="edge")
    stack = _resolve_taps(spec, weight, taps)
    return _conv_core(padded, x.shape[1], stack, bias if spec.has_bias else None, spec.dilation)


def receptive_field(stack: list[ConvSpec]) -> int:
    """Frames of past input that can reach one output of a stacked causal conv."""
    if not stack:
        raise ShapeError("receptive_field needs at least one layer")
    return 1 + sum(spec.history for spec in stack)
