"""Chunk-incremental content encoder with memory banks and cached left context.

At layer ``n`` and chunk ``i`` the queries are ``[W_q C, W_q R, W_q s]`` and the keys and
values are ``[W M, cached left context, W C, W R]``. ``C`` and ``R`` are updated with
attention + residual + FFN; the summary query yields the memory vector handed to layer
``n + 1`` for the next chunk. Labels come from the top layer's chunk frames only.
"""

from __future__ import annotations

import numpy as np
import numpy.typing as npt
import structlog

from chunkvc.config.schema import ExtractorConfig, MelConfig
from chunkvc.content.state import (
    ContentLabels,
    ExtractorState,
    LayerCache,
    config_fingerprint,
    empty_labels,
    keep_last,
    new_state,
)
from chunkvc.exceptions import ConfigError, ShapeError, StreamStateError
from chunkvc.kernels.attention import multi_head_attention, softmax_rows
from chunkvc.kernels.ops import layer_norm, linear, mean_pool_time, relu
from chunkvc.kernels.types import DTYPE, Tensor2D
from chunkvc.models import ModelWeights

logger = structlog.get_logger()

PREFIX = "content"


def weight_shapes(cfg: ExtractorConfig, mel: MelConfig) -> dict[str, tuple[int, ...]]:
    d, f = cfg.d_model, cfg.ffn_dim
    shapes: dict[str, tuple[int, ...]] = {
        f"{PREFIX}.input.weight": (d, mel.n_mels),
        f"{PREFIX}.input.bias": (d,),
    }
    for n in range(cfg.layers):
        base = f"{PREFIX}.layers.{n}"
        for proj in ("q", "k", "v", "out"):
            shapes[f"{base}.attn.{proj}.weight"] = (d, d)
            shapes[f"{base}.attn.{proj}.bias"] = (d,)
        shapes[f"{base}.ffn.w1.weight"] = (f, d)
        shapes[f"{base}.ffn.w1.bias"] = (f,)
        shapes[f"{base}.ffn.w2.weight"] = (d, f)
        shapes[f"{base}.ffn.w2.bias"] = (d,)
        shapes[f"{base}.norm.gain"] = (d,)
        shapes[f"{base}.norm.bias"] = (d,)
    shapes[f"{PREFIX}.output.weight"] = (cfg.classes, d)
    shapes[f"{PREFIX}.output.bias"] = (cfg.classes,)
    return shapes


def project_labels(
    c_top: Tensor2D, u_weight: npt.ArrayLike, u_bias: npt.ArrayLike | None = None
) -> ContentLabels:
    """argmax_j Softmax(U · C)[j, t] per frame; ties go to the smallest index."""
    if c_top.shape[1] < 1:
        raise ShapeError("project_labels needs at least one frame")
    weight = np.asarray(u_weight)
    bias = None if u_bias is None else np.asarray(u_bias)
    logits = linear(c_top, weight, bias)
    probs = softmax_rows(logits.T.astype(np.float64))
    return np.argmax(probs, axis=1).astype(np.int64)


class StreamContentExtractor:
    """Stateless extractor: all per-stream data lives in :class:`ExtractorState`."""

    def __init__(self, cfg: ExtractorConfig, mel: MelConfig, weights: ModelWeights) -> None:
        if cfg.d_model % cfg.heads != 0:
            raise ConfigError(f"extractor.d_model {cfg.d_model} not divisible by {cfg.heads}")
        self.cfg = cfg
        self.mel = mel
        self.weights = weights

    def new_state(self) -> ExtractorState:
        return new_state(self.cfg)

    # -- layer math ---------------------------------------------------------------

    def _proj(self, n: int, name: str, x: Tensor2D) -> Tensor2D:
        base = f"{PREFIX}.layers.{n}.attn.{name}"
        return linear(x, self.weights.wide(f"{base}.weight"), self.weights.wide(f"{base}.bias"))

    def _ffn(self, n: int, h: Tensor2D) -> Tensor2D:
        base = f"{PREFIX}.layers.{n}"
        w = self.weights
        hidden = relu(linear(h, w.wide(f"{base}.ffn.w1.weight"), w.wide(f"{base}.ffn.w1.bias")))
        out = linear(hidden, w.wide(f"{base}.ffn.w2.weight"), w.wide(f"{base}.ffn.w2.bias"))
        return layer_norm(h + out, w[f"{base}.norm.gain"], w[f"{base}.norm.bias"])

    def layer_forward(
        self, n: int, cache: LayerCache, c: Tensor2D, r: Tensor2D
    ) -> tuple[Tensor2D, Tensor2D, Tensor2D, Tensor2D, Tensor2D]:
        """One layer for one chunk.

        Returns ``(C_next, R_next, memory_vector, K_C, V_C)`` where ``K_C`` / ``V_C`` are
        the chunk's projected keys/values for the left-context cache.
        """
        summary = mean_pool_time(c, self.cfg.chunk_frames)[:, :1]
        q_c, q_r, q_s = (self._proj(n, "q", block) for block in (c, r, summary))
        k_c, k_r, k_m = (self._proj(n, "k", block) for block in (c, r, cache.memory))
        v_c, v_r, v_m = (self._proj(n, "v", block) for block in (c, r, cache.memory))

        keys = np.concatenate([k_m, cache.left_keys, k_c, k_r], axis=1)
        values = np.concatenate([v_m, cache.left_values, v_c, v_r], axis=1)
        queries = np.concatenate([q_c, q_r, q_s], axis=1)

        attended = self._proj(n, "out", multi_head_attention(queries, keys, values, self.cfg.heads))
        t_c, t_r = c.shape[1], r.shape[1]
        c_next = self._ffn(n, attended[:, :t_c] + c)
        r_next = self._ffn(n, attended[:, t_c : t_c + t_r] + r) if t_r else r
        memory_vector = np.ascontiguousarray(attended[:, t_c + t_r :])
        return c_next, r_next, memory_vector, k_c, v_c

    def _encode_input(self, mel: Tensor2D) -> Tensor2D:
        if mel.shape[0] != self.mel.n_mels:
            raise ShapeError(
                f"extractor input has {mel.shape[0]} bins, expected {self.mel.n_mels}"
            )
        w = self.weights
        return linear(mel, w.wide(f"{PREFIX}.input.weight"), w.wide(f"{PREFIX}.input.bias"))

    def _run_chunk(
        self, state: ExtractorState, chunk: Tensor2D, right_ctx: Tensor2D
    ) -> tuple[ContentLabels, ExtractorState]:
        cfg = self.cfg
        c = self._encode_input(chunk)
        r = self._encode_input(right_ctx)
        memories: list[Tensor2D] = []
        caches: list[LayerCache] = []
        for n in range(cfg.layers):
            cache = state.layers[n]
            c, r, memory_vector, k_c, v_c = self.layer_forward(n, cache, c, r)
            memories.append(memory_vector)
            caches.append(
                LayerCache(
                    memory=cache.memory,
                    left_keys=keep_last(
                        np.concatenate([cache.left_keys, k_c], axis=1), cfg.left_context_frames
                    ),
                    left_values=keep_last(
                        np.concatenate([cache.left_values, v_c], axis=1), cfg.left_context_frames
                    ),
                )
            )
        # memory produced at layer n feeds layer n + 1 from the next chunk on
        for n in range(1, cfg.layers):
            bank = np.concatenate([caches[n].memory, memories[n - 1]], axis=1)
            caches[n] = LayerCache(
                memory=keep_last(bank, cfg.memory_slots),
                left_keys=caches[n].left_keys,
                left_values=caches[n].left_values,
            )
        w = self.weights
        labels = project_labels(
            c, w.wide(f"{PREFIX}.output.weight"), w.wide(f"{PREFIX}.output.bias")
        )
        new = ExtractorState(
            layers=tuple(caches),
            fingerprint=state.fingerprint,
            chunk_index=state.chunk_index + 1,
        )
        logger.debug("content_chunk_processed", chunk_index=state.chunk_index, frames=c.shape[1])
        return labels, new

    def _check_state(self, state: ExtractorState) -> None:
        if state.fingerprint != config_fingerprint(self.cfg):
            raise StreamStateError("extractor state was created for a different configuration")
        if state.finished:
            raise StreamStateError("extractor state already flushed")

    # -- public operations ----------------------------------------------------------

    def process_chunk(
        self, state: ExtractorState, chunk: Tensor2D, right_ctx: Tensor2D
    ) -> tuple[ContentLabels, ExtractorState]:
        """Consume one full chunk plus its right context; emit one label per chunk frame."""
        self._check_state(state)
        cfg = self.cfg
        if chunk.shape[1] != cfg.chunk_frames:
            raise ShapeError(f"chunk has {chunk.shape[1]} frames, expected {cfg.chunk_frames}")
        if right_ctx.shape[1] != cfg.right_context_frames:
            raise ShapeError(
                f"right context has {right_ctx.shape[1]} frames, "
                f"expected {cfg.right_context_frames}"
            )
        return self._run_chunk(state, chunk, right_ctx)

    def flush(self, state: ExtractorState, tail: Tensor2D) -> tuple[ContentLabels, ExtractorState]:
        """Process a final partial chunk with zero right context; later calls return empty."""
        if state.finished:
            return empty_labels(), state
        self._check_state(state)
        if tail.shape[1] > self.cfg.chunk_frames:
            raise ShapeError(f"flush tail has {tail.shape[1]} frames > {self.cfg.chunk_frames}")
        if tail.shape[1] == 0:
            labels = empty_labels()
            after = state
        else:
            right = np.zeros((self.mel.n_mels, self.cfg.right_context_frames), dtype=DTYPE)
            labels, after = self._run_chunk(state, tail, right)
        finished = ExtractorState(
            layers=after.layers,
            fingerprint=after.fingerprint,
            chunk_index=after.chunk_index,
            finished=True,
        )
        return labels, finished

    def right_context_for(self, mel: Tensor2D, chunk_index: int) -> Tensor2D:
        """Right-context slice for ``chunk_index`` taken from ``mel``, zero-padded at the end."""
        cfg = self.cfg
        start = (chunk_index + 1) * cfg.chunk_frames
        block = mel[:, start : start + cfg.right_context_frames]
        missing = cfg.right_context_frames - block.shape[1]
        if missing > 0:
            block = np.concatenate([block, np.zeros((mel.shape[0], missing), dtype=DTYPE)], axis=1)
        return block

    def run(self, mel: Tensor2D) -> ContentLabels:
        """Label a whole mel sequence chunk by chunk (final partial chunk via flush)."""
        cfg = self.cfg
        state = self.new_state()
        labels: list[ContentLabels] = []
        full_chunks = mel.shape[1] // cfg.chunk_frames
        for i in range(full_chunks):
            chunk = mel[:, i * cfg.chunk_frames : (i + 1) * cfg.chunk_frames]
            out, state = self.process_chunk(state, chunk, self.right_context_for(mel, i))
            labels.append(out)
        tail = mel[:, full_chunks * cfg.chunk_frames :]
        out, _ = self.flush(state, tail)
        labels.append(out)
        return np.concatenate(labels) if labels else empty_labels()
