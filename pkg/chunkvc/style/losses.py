"""Forward values of the clustering-VQ training objectives."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from chunkvc.exceptions import ShapeError
from chunkvc.style.quantizer import squared_distances

Vector = npt.ArrayLike


def _vector(value: Vector) -> npt.NDArray[np.float64]:
    array = np.asarray(value, dtype=np.float64)
    if array.ndim != 1:
        raise ShapeError("expected a vector")
    return array


def cosine_similarity(a: Vector, b: Vector) -> float:
    left, right = _vector(a), _vector(b)
    if left.shape != right.shape:
        raise ShapeError(f"vector dims differ: {left.shape[0]} vs {right.shape[0]}")
    norms = float(np.linalg.norm(left) * np.linalg.norm(right))
    if norms == 0.0:
        raise ValueError("cosine similarity is undefined for a zero-norm vector")
    return float(np.dot(left, right) / norms)


def cvq_loss(z: Vector, e: Vector, beta: float = 0.25) -> float:
    """Codebook + commitment terms: (1 + β)·‖z − e‖²; stop-gradient is the identity."""
    latent, code = _vector(z), _vector(e)
    if latent.shape != code.shape:
        raise ShapeError(f"latent dim {latent.shape[0]} ≠ code dim {code.shape[0]}")
    diff = latent - code
    distance = float(np.dot(diff, diff))
    return distance + beta * distance


def contrastive_loss(e: Vector, z_pos: Vector, z_negs: npt.ArrayLike) -> float:
    """InfoNCE with one positive: −log(exp(s⁺) / (exp(s⁺) + Σ exp(s⁻)))."""
    negatives = np.atleast_2d(np.asarray(z_negs, dtype=np.float64))
    if negatives.shape[0] == 0:
        raise ShapeError("contrastive loss needs at least one negative")
    sims = np.array(
        [cosine_similarity(e, z_pos)] + [cosine_similarity(e, row) for row in negatives]
    )
    shifted = np.exp(sims - sims.max())
    return float(-np.log(shifted[0] / shifted.sum()))


def contrastive_loss_softplus(e: Vector, z_pos: Vector, z_negs: npt.ArrayLike) -> float:
    """Same value as :func:`contrastive_loss` written as ln(1 + Σ exp(s⁻ − s⁺))."""
    negatives = np.atleast_2d(np.asarray(z_negs, dtype=np.float64))
    if negatives.shape[0] == 0:
        raise ShapeError("contrastive loss needs at least one negative")
    positive = cosine_similarity(e, z_pos)
    gaps = np.array([cosine_similarity(e, row) - positive for row in negatives])
    return float(np.log1p(np.sum(np.exp(gaps))))


def contrastive_pairs(
    e: Vector, latents: npt.ArrayLike, negatives: int, seed: int = 0
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Closest latent as the positive, ``negatives`` of the remaining ones drawn at random."""
    table = np.asarray(latents, dtype=np.float64)
    if table.ndim != 2 or table.shape[0] < 2:
        raise ShapeError("contrastive pairs need at least two latents")
    distances = squared_distances(e, table)
    positive = int(np.argmin(distances))
    others = np.delete(np.arange(table.shape[0]), positive)
    rng = np.random.default_rng(seed)
    count = min(negatives, others.size)
    chosen = rng.choice(others, size=count, replace=False)
    return table[positive], table[np.sort(chosen)]
