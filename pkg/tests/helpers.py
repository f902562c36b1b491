"""Shared helpers for tests (tiny configs, seeded models and audio)."""

from __future__ import annotations

from typing import Any

import numpy as np

from chunkvc.config import ModelConfig, preset_config
from chunkvc.content.extractor import PREFIX as CONTENT_PREFIX
from chunkvc.content.extractor import project_labels
from chunkvc.dsp.wav import PcmAudio
from chunkvc.kernels.attention import multi_head_attention
from chunkvc.kernels.ops import layer_norm, linear, mean_pool_time, relu
from chunkvc.model_io import init_weights
from chunkvc.models import ModelWeights
from chunkvc.pipeline import ConversionModel

# ---------------------------------------------------------------------------
# Configs
# ---------------------------------------------------------------------------

TINY: dict[str, Any] = {
    "mel": {"n_mels": 16},
    "extractor": {
        "layers": 2,
        "d_model": 8,
        "heads": 2,
        "ffn_dim": 16,
        "left_context_frames": 8,
        "memory_slots": 4,
        "classes": 10,
    },
    "style": {
        "codebook_size": 8,
        "d_code": 4,
        "d_timbre": 6,
        "hidden": 8,
        "timbre_layers": 2,
        "style_layers": 1,
        "d_attn": 4,
    },
    "decoder": {
        "content_dim": 8,
        "pitch_emb_dim": 3,
        "pitch_hidden": 8,
        "pitch_dilations": [1, 2],
        "hidden": 8,
        "dilations": [1, 2],
    },
    "vocoder": {
        "base_channels": 4,
        "resblock_kernels": [3],
        "resblock_dilations": [1, 3],
        "pre_kernel": 3,
        "stage_kernel": 3,
        "post_kernel": 3,
    },
}


def tiny_config(setting: str = "full", **overrides: Any) -> ModelConfig:
    """Small-dimension config for the named setting; ``overrides`` merge on top."""
    data = dict(TINY)
    for section, values in overrides.items():
        data[section] = {**data.get(section, {}), **values}
    return preset_config(setting, **data)


def make_model(cfg: ModelConfig, seed: int = 0) -> ConversionModel:
    return ConversionModel(cfg, init_weights(cfg, seed))


# ---------------------------------------------------------------------------
# Audio
# ---------------------------------------------------------------------------


def noise(samples: int, seed: int = 0, scale: float = 0.1) -> PcmAudio:
    rng = np.random.default_rng(seed)
    return PcmAudio(samples=(scale * rng.standard_normal(samples)).astype(np.float32))


def sine(samples: int, freq: float, amplitude: float = 0.5) -> PcmAudio:
    t = np.arange(samples) / 16000.0
    return PcmAudio(samples=(amplitude * np.sin(2 * np.pi * freq * t)).astype(np.float32))


def random_tensor(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return rng.standard_normal(shape).astype(np.float32)


# ---------------------------------------------------------------------------
# Content extractor oracle
# ---------------------------------------------------------------------------


def recurrence_oracle(cfg: ModelConfig, weights: ModelWeights, mel: np.ndarray) -> np.ndarray:
    """Labels for every full chunk of ``mel``, recomputed from scratch.

    Memory banks and left-context caches are rebuilt as plain lists over the whole
    history for each chunk, then cut to their configured lengths.
    """
    ext = cfg.extractor
    f, r_frames = ext.chunk_frames, ext.right_context_frames

    def proj(n: int, name: str, x: np.ndarray) -> np.ndarray:
        base = f"{CONTENT_PREFIX}.layers.{n}.attn.{name}"
        return linear(x, weights.wide(f"{base}.weight"), weights.wide(f"{base}.bias"))

    def ffn(n: int, h: np.ndarray) -> np.ndarray:
        base = f"{CONTENT_PREFIX}.layers.{n}"
        hidden = relu(
            linear(h, weights.wide(f"{base}.ffn.w1.weight"), weights.wide(f"{base}.ffn.w1.bias"))
        )
        out = linear(
            hidden, weights.wide(f"{base}.ffn.w2.weight"), weights.wide(f"{base}.ffn.w2.bias")
        )
        return layer_norm(h + out, weights[f"{base}.norm.gain"], weights[f"{base}.norm.bias"])

    def encode(x: np.ndarray) -> np.ndarray:
        return linear(
            x,
            weights.wide(f"{CONTENT_PREFIX}.input.weight"),
            weights.wide(f"{CONTENT_PREFIX}.input.bias"),
        )

    chunks = mel.shape[1] // f
    # memories[n][i]: memory vector produced at layer n by chunk i
    memories: list[list[np.ndarray]] = [[] for _ in range(ext.layers)]
    keys: list[list[np.ndarray]] = [[] for _ in range(ext.layers)]
    values: list[list[np.ndarray]] = [[] for _ in range(ext.layers)]
    labels = []
    for i in range(chunks):
        c = encode(mel[:, i * f : (i + 1) * f])
        right = mel[:, (i + 1) * f : (i + 1) * f + r_frames]
        if right.shape[1] < r_frames:
            pad = np.zeros((mel.shape[0], r_frames - right.shape[1]), dtype=np.float32)
            right = np.concatenate([right, pad], axis=1)
        r = encode(right)
        for n in range(ext.layers):
            bank = memories[n - 1][:i] if n > 0 else []
            bank = bank[max(0, len(bank) - ext.memory_slots) :] if ext.memory_slots else []
            memory = (
                np.concatenate(bank, axis=1) if bank else np.zeros((ext.d_model, 0), np.float32)
            )
            left_k = np.concatenate(keys[n] + [np.zeros((ext.d_model, 0), np.float32)], axis=1)
            left_v = np.concatenate(values[n] + [np.zeros((ext.d_model, 0), np.float32)], axis=1)
            left_k = left_k[:, max(0, left_k.shape[1] - ext.left_context_frames) :]
            left_v = left_v[:, max(0, left_v.shape[1] - ext.left_context_frames) :]
            if ext.left_context_frames == 0:
                left_k, left_v = left_k[:, :0], left_v[:, :0]
            summary = mean_pool_time(c, f)[:, :1]
            q = np.concatenate([proj(n, "q", c), proj(n, "q", r), proj(n, "q", summary)], axis=1)
            k_c, v_c = proj(n, "k", c), proj(n, "v", c)
            k = np.concatenate([proj(n, "k", memory), left_k, k_c, proj(n, "k", r)], axis=1)
            v = np.concatenate([proj(n, "v", memory), left_v, v_c, proj(n, "v", r)], axis=1)
            attended = proj(n, "out", multi_head_attention(q, k, v, ext.heads))
            keys[n].append(k_c)
            values[n].append(v_c)
            memories[n].append(attended[:, f + r.shape[1] :])
            new_c = ffn(n, attended[:, :f] + c)
            r = ffn(n, attended[:, f : f + r.shape[1]] + r) if r.shape[1] else r
            c = new_c
        labels.append(
            project_labels(
                c,
                weights.wide(f"{CONTENT_PREFIX}.output.weight"),
                weights.wide(f"{CONTENT_PREFIX}.output.bias"),
            )
        )
    return np.concatenate(labels).astype(np.int64) if labels else np.zeros(0, np.int64)
