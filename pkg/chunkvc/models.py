"""Shared data models used across modules."""

from __future__ import annotations

import threading
from collections.abc import Iterator, Mapping

import numpy as np
import numpy.typing as npt

from chunkvc.exceptions import MissingTensorError

WeightArray = npt.NDArray[np.float32]


class ModelWeights(Mapping[str, WeightArray]):
    """Ordered, read-only name → float32 tensor map.

    Every lookup is recorded in :attr:`consumed` so the set of names the model actually
    reads can be audited against the container.
    """

    def __init__(self, tensors: Mapping[str, npt.ArrayLike]) -> None:
        self._tensors: dict[str, WeightArray] = {}
        for name, value in tensors.items():
            array = np.ascontiguousarray(np.asarray(value, dtype=np.float32))
            array.setflags(write=False)
            self._tensors[name] = array
        self._wide: dict[str, npt.NDArray[np.float64]] = {}
        self._taps: dict[str, npt.NDArray[np.float64]] = {}
        self._lock = threading.Lock()
        self.consumed: set[str] = set()

    def __getitem__(self, name: str) -> WeightArray:
        try:
            tensor = self._tensors[name]
        except KeyError as exc:
            raise MissingTensorError(f"missing weight tensor: {name}") from exc
        self.consumed.add(name)
        return tensor

    def __contains__(self, name: object) -> bool:
        return name in self._tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def wide(self, name: str) -> npt.NDArray[np.float64]:
        """float64 view of a tensor, converted once and cached."""
        tensor = self[name]
        cached = self._wide.get(name)
        if cached is None:
            with self._lock:
                cached = self._wide.get(name)
                if cached is None:
                    cached = tensor.astype(np.float64)
                    cached.setflags(write=False)
                    self._wide[name] = cached
        return cached

    def taps(self, name: str) -> npt.NDArray[np.float64]:
        """A conv weight as a cached float64 ``(kernel, out, in)`` stack."""
        tensor = self[name]
        cached = self._taps.get(name)
        if cached is None:
            with self._lock:
                cached = self._taps.get(name)
                if cached is None:
                    cached = np.ascontiguousarray(np.moveaxis(tensor.astype(np.float64), -1, 0))
                    cached.setflags(write=False)
                    self._taps[name] = cached
        return cached

    def replace(self, name: str, value: npt.ArrayLike) -> ModelWeights:
        """Copy with one tensor swapped (the original stays untouched)."""
        tensors: dict[str, npt.ArrayLike] = dict(self._tensors)
        tensors[name] = value
        return ModelWeights(tensors)

    def reset_audit(self) -> None:
        self.consumed = set()
