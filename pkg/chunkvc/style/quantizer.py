"""Style codebook: nearest-code lookup, usage bookkeeping and dead-code reinitialisation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
import structlog

from chunkvc.exceptions import ShapeError
from chunkvc.kernels.types import DTYPE

logger = structlog.get_logger()

CodeVector = npt.NDArray[np.float32]


@dataclass
class Codebook:
    """``K`` code vectors of dimension ``d_code`` plus per-entry usage counters."""

    entries: npt.NDArray[np.float32]
    usage_counts: npt.NDArray[np.int64] = field(default_factory=lambda: np.zeros(0, np.int64))

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=DTYPE)
        if entries.ndim != 2 or entries.shape[0] < 2:
            raise ShapeError(f"codebook needs >= 2 entries of rank 1, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ShapeError("codebook entries must be finite")
        self.entries = np.ascontiguousarray(entries)
        if self.usage_counts.shape != (entries.shape[0],):
            self.usage_counts = np.zeros(entries.shape[0], dtype=np.int64)

    @property
    def size(self) -> int:
        return int(self.entries.shape[0])

    @property
    def dim(self) -> int:
        return int(self.entries.shape[1])

    def copy(self) -> Codebook:
        return Codebook(entries=self.entries.copy(), usage_counts=self.usage_counts.copy())

    def reset_usage(self) -> None:
        self.usage_counts = np.zeros(self.size, dtype=np.int64)

    def perplexity(self) -> float:
        """exp(entropy) of the usage distribution; 0.0 before any lookup."""
        total = int(self.usage_counts.sum())
        if total == 0:
            return 0.0
        probs = self.usage_counts[self.usage_counts > 0] / total
        return float(np.exp(-np.sum(probs * np.log(probs))))

    def used_fraction(self) -> float:
        return float(np.count_nonzero(self.usage_counts)) / self.size


def squared_distances(z: npt.ArrayLike, entries: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """‖z − entry_k‖² for every entry, accumulated in float64."""
    vector = np.asarray(z, dtype=np.float64)
    table = np.asarray(entries, dtype=np.float64)
    if vector.ndim != 1 or vector.shape[0] != table.shape[1]:
        raise ShapeError(f"latent of shape {vector.shape} does not match code dim {table.shape[1]}")
    diff = table - vector[np.newaxis, :]
    return np.sum(diff * diff, axis=1)


def nearest_code(z: npt.ArrayLike, entries: npt.ArrayLike) -> int:
    """Index of the closest entry; ties go to the smallest index."""
    return int(np.argmin(squared_distances(z, entries)))


def quantize(z: npt.ArrayLike, codebook: Codebook) -> tuple[int, CodeVector]:
    """Snap ``z`` to its nearest code and count the use."""
    index = nearest_code(z, codebook.entries)
    codebook.usage_counts[index] += 1
    return index, codebook.entries[index].copy()


def reinit_unused_codes(
    codebook: Codebook, batch_latents: npt.ArrayLike, seed: int = 0
) -> Codebook:
    """Replace every code no batch latent maps to with a randomly drawn batch latent.

    Usage is measured by assigning each latent in ``batch_latents`` (rows) to its nearest
    code. The returned codebook starts with zeroed usage counters; the input is untouched.
    """
    latents = np.asarray(batch_latents, dtype=DTYPE)
    if latents.ndim != 2 or latents.shape[0] == 0:
        raise ShapeError("reinit_unused_codes needs a non-empty (n, d_code) batch")
    if latents.shape[1] != codebook.dim:
        raise ShapeError(f"batch latents have dim {latents.shape[1]}, codebook {codebook.dim}")
    counts = np.zeros(codebook.size, dtype=np.int64)
    for row in latents:
        counts[nearest_code(row, codebook.entries)] += 1

    rng = np.random.default_rng(seed)
    entries = codebook.entries.copy()
    unused = np.flatnonzero(counts == 0)
    for index in unused:
        entries[index] = latents[rng.integers(latents.shape[0])]
    logger.debug("codes_reinitialized", unused=int(unused.size), batch=int(latents.shape[0]))
    return Codebook(entries=entries)
