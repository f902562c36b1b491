"""Cross-field configuration validation."""

from __future__ import annotations

import math

from chunkvc.config.schema import LABEL_FRAME_MS, ModelConfig


def _all_odd(values: list[int]) -> bool:
    return all(value % 2 == 1 for value in values)


def validate_config(config: ModelConfig) -> list[str]:
    errors: list[str] = []

    mel = config.mel
    if mel.sample_rate != 16000:
        errors.append(f"mel.sample_rate: must be 16000, got {mel.sample_rate}")
    if mel.win < mel.hop:
        errors.append(f"mel.win: {mel.win} must be >= hop {mel.hop}")
    if mel.f_max <= mel.f_min:
        errors.append("mel.f_max: must exceed f_min")
    if mel.f_max > mel.sample_rate / 2:
        errors.append(f"mel.f_max: {mel.f_max} exceeds Nyquist {mel.sample_rate / 2}")
    if not math.isclose(mel.frame_ms, LABEL_FRAME_MS):
        errors.append(f"mel.hop: frame period {mel.frame_ms} ms ≠ {LABEL_FRAME_MS} ms")

    # Vocoder
    vocoder = config.vocoder
    if not vocoder.upsample_factors:
        errors.append("vocoder.upsample_factors: must not be empty")
    else:
        product = math.prod(vocoder.upsample_factors)
        if product != mel.hop:
            errors.append(f"vocoder.upsample_factors: product {product} ≠ hop {mel.hop}")
        if any(factor < 1 for factor in vocoder.upsample_factors):
            errors.append("vocoder.upsample_factors: factors must be >= 1")
    if not vocoder.resblock_kernels:
        errors.append("vocoder.resblock_kernels: must not be empty")
    kernels = [vocoder.pre_kernel, vocoder.stage_kernel, vocoder.post_kernel]
    if not _all_odd(kernels + vocoder.resblock_kernels):
        errors.append("vocoder: all kernels must be odd")
    if not vocoder.resblock_dilations or any(d < 1 for d in vocoder.resblock_dilations):
        errors.append("vocoder.resblock_dilations: dilations must be >= 1")

    # Extractor / session agreement
    extractor = config.extractor
    session = config.session
    if extractor.d_model % extractor.heads != 0:
        errors.append(
            f"extractor.d_model: {extractor.d_model} not divisible by heads {extractor.heads}"
        )
    if session.chunk_ms % LABEL_FRAME_MS != 0:
        errors.append(f"session.chunk_ms: {session.chunk_ms} not multiple of {LABEL_FRAME_MS}")
    elif session.chunk_frames != extractor.chunk_frames:
        errors.append(
            f"extractor.chunk_frames: {extractor.chunk_frames} ≠ session chunk "
            f"{session.chunk_frames} frames"
        )
    if session.right_context_chunks != extractor.right_context_chunks:
        errors.append(
            "extractor.right_context_chunks: must equal session.right_context_chunks"
        )

    # Style / decoder
    style = config.style
    if style.codebook_size < 2:
        errors.append("style.codebook_size: must be >= 2")
    if config.decoder.content_dim != extractor.d_model:
        errors.append("decoder.content_dim: must equal extractor.d_model")
    decoder = config.decoder
    for name, dilations in (
        ("decoder.pitch_dilations", decoder.pitch_dilations),
        ("decoder.dilations", decoder.dilations),
    ):
        if not dilations or any(d < 1 for d in dilations):
            errors.append(f"{name}: dilations must be non-empty and >= 1")

    return errors
