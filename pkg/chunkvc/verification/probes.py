"""Self-checks run by ``chunkvc verify`` against a loaded model."""

from __future__ import annotations

import time
from collections.abc import Callable

import numpy as np
import structlog
from pydantic import BaseModel

from chunkvc.dsp.wav import PcmAudio
from chunkvc.kernels.ops import pixel_shuffle, pixel_unshuffle
from chunkvc.metrics.models import overall_latency
from chunkvc.pipeline.context import convert_with_context, stream_convert
from chunkvc.pipeline.model import ConversionModel
from chunkvc.pipeline.session import StreamSession
from chunkvc.style.quantizer import Codebook, quantize

logger = structlog.get_logger()

CONTEXT_TOLERANCE = 1e-5


class ProbeResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    duration_ms: float = 0.0


def _noise(rng: np.random.Generator, samples: int) -> PcmAudio:
    return PcmAudio(samples=(0.1 * rng.standard_normal(samples)).astype(np.float32))


def probe_streaming_equivalence(model: ConversionModel, seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    reference = _noise(rng, 8 * model.cfg.style.token_frames * model.cfg.mel.hop)
    source = _noise(rng, 3 * model.cfg.mel.sample_rate // 4 + 123)

    whole = StreamSession(model)
    whole.prepare_reference(reference)
    one_shot = stream_convert(whole, source, slice_samples=len(source))

    sliced = StreamSession(model)
    context = sliced.prepare_reference(reference)
    pieces = stream_convert(sliced, source, slice_samples=model.cfg.mel.sample_rate // 100)

    if len(one_shot) != len(source) or len(pieces) != len(source):
        return False, f"lengths {len(one_shot)}/{len(pieces)} ≠ input {len(source)}"
    if not np.array_equal(one_shot.samples, pieces.samples):
        return False, "10 ms pushes differ from a single push"
    recomputed = convert_with_context(model, source, context)
    gap = float(np.max(np.abs(recomputed.samples - one_shot.samples)))
    if gap > CONTEXT_TOLERANCE:
        return False, f"sliding-context path differs by {gap:.2e}"
    return True, f"bit-exact over {len(source)} samples; context path within {gap:.1e}"


def probe_causality(model: ConversionModel, seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    cfg = model.cfg
    frames, hop = 8, cfg.mel.hop
    mel = rng.standard_normal((cfg.mel.n_mels, frames)).astype(np.float32)
    base, _ = model.vocoder.vocode_chunk(mel, model.vocoder.new_state())

    fused_dim = cfg.decoder.content_dim + cfg.style.d_timbre + cfg.style.d_code
    features = rng.standard_normal((fused_dim, frames)).astype(np.float32)
    logf0, _ = model.decoder.predict_pitch(features, model.decoder.new_state())
    for t in range(frames):
        bumped = mel.copy()
        bumped[:, t] += 1.0
        wave, _ = model.vocoder.vocode_chunk(bumped, model.vocoder.new_state())
        if not np.array_equal(wave[: t * hop], base[: t * hop]):
            return False, f"vocoder samples before frame {t} changed"
        moved = features.copy()
        moved[:, t] += 1.0
        pitch, _ = model.decoder.predict_pitch(moved, model.decoder.new_state())
        if not np.array_equal(pitch[:t], logf0[:t]):
            return False, f"pitch before frame {t} changed"
    return True, f"{frames} single-frame perturbations"


def probe_shuffle_permutation(model: ConversionModel, seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    channels = 4
    for factor in model.cfg.vocoder.upsample_factors:
        x = rng.standard_normal((channels * factor, 5)).astype(np.float32)
        y = pixel_shuffle(x, factor)
        if y.shape != (channels, 5 * factor):
            return False, f"shape {y.shape} for factor {factor}"
        if not np.array_equal(np.sort(x, axis=None), np.sort(y, axis=None)):
            return False, f"factor {factor} is not a permutation"
        if not np.array_equal(pixel_unshuffle(y, factor), x):
            return False, f"factor {factor} is not invertible"
    return True, f"factors {model.cfg.vocoder.upsample_factors}"


def probe_quantizer(model: ConversionModel, seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    book = model.style.codebook
    scratch = Codebook(entries=book.entries.copy())
    draws = 200
    for _ in range(draws):
        z = rng.standard_normal(book.dim).astype(np.float32) * 0.1
        index, code = quantize(z, scratch)
        best, best_dist = 0, float("inf")
        for k, entry in enumerate(book.entries):
            diff = entry.astype(np.float64) - z.astype(np.float64)
            dist = float(np.sum(diff * diff))
            if dist < best_dist:
                best, best_dist = k, dist
        if index != best or not np.array_equal(code, book.entries[best]):
            return False, f"nearest code {best}, quantize chose {index}"
    return True, (
        f"{draws} draws; codebook perplexity {scratch.perplexity():.2f}, "
        f"{100 * scratch.used_fraction():.0f}% used"
    )


def probe_latency_identity(model: ConversionModel, seed: int) -> tuple[bool, str]:
    fast = overall_latency((2.76, 7.82, 6.29), 20.0, 0.0)
    if abs(fast - 36.87) > 1e-9:
        return False, f"fast-setting sum {fast} ≠ 36.87"
    rng = np.random.default_rng(seed)
    session = StreamSession(model)
    session.prepare_reference(_noise(rng, 8 * model.cfg.style.token_frames * model.cfg.mel.hop))
    stream_convert(session, _noise(rng, 4 * session.chunk_samples))
    report = session.latency_report()
    if not report.satisfies_identity():
        return False, f"overall {report.overall_ms} ≠ sum of its terms"
    return True, f"overall {report.overall_ms:.2f} ms, rtf {report.overall_rtf:.3f}"


PROBES: dict[str, Callable[[ConversionModel, int], tuple[bool, str]]] = {
    "streaming_equivalence": probe_streaming_equivalence,
    "causality": probe_causality,
    "shuffle_permutation": probe_shuffle_permutation,
    "quantizer_oracle": probe_quantizer,
    "latency_identity": probe_latency_identity,
}


def run_probes(model: ConversionModel, seed: int = 0) -> list[ProbeResult]:
    results = []
    for name, probe in PROBES.items():
        start = time.perf_counter()
        try:
            passed, detail = probe(model, seed)
        except Exception as exc:  # noqa: BLE001
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        elapsed = (time.perf_counter() - start) * 1000.0
        logger.info("probe_finished", probe=name, passed=passed, duration_ms=round(elapsed, 1))
        results.append(ProbeResult(name=name, passed=passed, detail=detail, duration_ms=elapsed))
    return results
