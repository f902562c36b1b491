"""Tensor conventions shared by every numeric module.

All feature maps are 2-D ``float32`` arrays in channel-major layout: ``x[c, t]`` is
channel ``c`` at frame ``t``. Per-frame dot products accumulate in ``float64`` and are
rounded back to ``float32``, so a frame's value never depends on how many other frames
were computed alongside it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from chunkvc.exceptions import ShapeError

Tensor2D = npt.NDArray[np.float32]
Array = npt.NDArray[np.floating]

DTYPE = np.float32
ACC_DTYPE = np.float64


def as_tensor(values: npt.ArrayLike) -> Tensor2D:
    """Coerce to a finite 2-D float32 array."""
    tensor = np.asarray(values, dtype=DTYPE)
    if tensor.ndim == 1:
        tensor = tensor[np.newaxis, :]
    if tensor.ndim != 2:
        raise ShapeError(f"expected a 2-D (channels, frames) tensor, got rank {tensor.ndim}")
    return tensor


def empty(channels: int) -> Tensor2D:
    return np.zeros((channels, 0), dtype=DTYPE)


@dataclass(frozen=True)
class ConvSpec:
    in_channels: int
    out_channels: int
    kernel: int = 1
    dilation: int = 1
    has_bias: bool = True

    def __post_init__(self) -> None:
        if self.kernel < 1:
            raise ShapeError(f"kernel must be >= 1, got {self.kernel}")
        if self.dilation < 1:
            raise ShapeError(f"dilation must be >= 1, got {self.dilation}")

    @property
    def receptive_extent(self) -> int:
        return 1 + (self.kernel - 1) * self.dilation

    @property
    def history(self) -> int:
        return (self.kernel - 1) * self.dilation

    @property
    def weight_shape(self) -> tuple[int, int, int]:
        return (self.out_channels, self.in_channels, self.kernel)


@dataclass
class ConvState:
    """Last ``(kernel - 1) * dilation`` input frames seen by one causal conv."""

    tail: Tensor2D = field(default_factory=lambda: empty(0))

    @classmethod
    def zeros(cls, spec: ConvSpec) -> ConvState:
        return cls(tail=np.zeros((spec.in_channels, spec.history), dtype=DTYPE))

    def copy(self) -> ConvState:
        return ConvState(tail=self.tail.copy())
