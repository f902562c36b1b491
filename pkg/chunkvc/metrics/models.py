"""Latency report models."""

from __future__ import annotations

import math
from collections.abc import Sequence

from pydantic import BaseModel, ConfigDict, Field

from chunkvc.exceptions import LatencyError

STAGES = ("content", "main", "vocoder")

REPORT_KEYS = (
    "content_rtf",
    "main_rtf",
    "vocoder_rtf",
    "content_ms",
    "main_ms",
    "vocoder_ms",
    "chunk_ms",
    "right_context_ms",
    "overall_ms",
    "overall_rtf",
)


def overall_latency(
    stage_delays_ms: Sequence[float], chunk_ms: float, right_context_ms: float
) -> float:
    """Σ stage delays + chunk size + right context, summed without intermediate rounding."""
    terms = [*stage_delays_ms, chunk_ms, right_context_ms]
    if len(stage_delays_ms) != len(STAGES):
        raise LatencyError(f"expected {len(STAGES)} stage delays, got {len(stage_delays_ms)}")
    if any(not math.isfinite(t) or t < 0 for t in terms):
        raise LatencyError(f"latency terms must be finite and non-negative: {terms}")
    return math.fsum(terms)


class StageTiming(BaseModel):
    name: str
    chunks: int = 0
    total_ms: float = 0.0
    mean_ms: float = 0.0
    p95_ms: float = 0.0


class LatencyReport(BaseModel):
    """Per-stage real-time factors and delays plus the overall algorithmic latency."""

    model_config = ConfigDict(extra="forbid")

    content_rtf: float = Field(ge=0.0)
    main_rtf: float = Field(ge=0.0)
    vocoder_rtf: float = Field(ge=0.0)
    content_ms: float = Field(ge=0.0)
    main_ms: float = Field(ge=0.0)
    vocoder_ms: float = Field(ge=0.0)
    chunk_ms: float = Field(ge=0.0)
    right_context_ms: float = Field(ge=0.0)
    overall_ms: float = Field(ge=0.0)
    overall_rtf: float = Field(ge=0.0)

    @classmethod
    def from_rtfs(
        cls, rtfs: Sequence[float], chunk_ms: float, right_context_ms: float
    ) -> LatencyReport:
        delays = [rtf * chunk_ms for rtf in rtfs]
        content, main, vocoder = rtfs
        return cls(
            content_rtf=content,
            main_rtf=main,
            vocoder_rtf=vocoder,
            content_ms=delays[0],
            main_ms=delays[1],
            vocoder_ms=delays[2],
            chunk_ms=chunk_ms,
            right_context_ms=right_context_ms,
            overall_ms=overall_latency(delays, chunk_ms, right_context_ms),
            overall_rtf=math.fsum(rtfs),
        )

    @property
    def stage_delays(self) -> tuple[float, float, float]:
        return (self.content_ms, self.main_ms, self.vocoder_ms)

    def satisfies_identity(self) -> bool:
        expected = overall_latency(self.stage_delays, self.chunk_ms, self.right_context_ms)
        return self.overall_ms == expected

    def to_text(self) -> str:
        """Flat ``key: value`` document, one line per field in a fixed order."""
        values = self.model_dump()
        return "".join(f"{key}: {values[key]!r}\n" for key in REPORT_KEYS)

    @classmethod
    def from_text(cls, text: str) -> LatencyReport:
        data: dict[str, float] = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, value = line.partition(":")
            data[key.strip()] = float(value)
        return cls.model_validate(data)
