"""Tests for chunkvc.metrics."""

import math

import pytest
from pydantic import ValidationError

from chunkvc.exceptions import LatencyError
from chunkvc.metrics import REPORT_KEYS, LatencyCollector, LatencyReport, overall_latency


def test_fast_setting_identity():
    assert overall_latency((2.76, 7.82, 6.29), 20, 0) == pytest.approx(36.87, abs=1e-9)


def test_full_setting_identity():
    total = overall_latency((5.60, 7.88, 6.21), 80, 40)
    assert total == pytest.approx(139.69, abs=1e-9)
    assert abs(total - 139.71) <= 0.05


def test_zero_terms():
    assert overall_latency((0.0, 0.0, 0.0), 0.0, 0.0) == 0.0


@pytest.mark.parametrize(
    "delays, chunk, right",
    [
        ((1.0, 2.0), 20.0, 0.0),
        ((1.0, 2.0, 3.0, 4.0), 20.0, 0.0),
        ((1.0, -2.0, 3.0), 20.0, 0.0),
        ((1.0, 2.0, 3.0), math.nan, 0.0),
        ((1.0, 2.0, 3.0), 20.0, math.inf),
    ],
)
def test_invalid_terms_rejected(delays, chunk, right):
    with pytest.raises(LatencyError):
        overall_latency(delays, chunk, right)


def test_report_from_rtfs():
    report = LatencyReport.from_rtfs([0.1, 0.25, 0.05], chunk_ms=80.0, right_context_ms=160.0)
    assert report.content_ms == pytest.approx(8.0)
    assert report.main_ms == pytest.approx(20.0)
    assert report.vocoder_ms == pytest.approx(4.0)
    assert report.overall_ms == pytest.approx(272.0)
    assert report.overall_rtf == pytest.approx(0.4)
    assert report.satisfies_identity()


def test_report_text_round_trip():
    report = LatencyReport.from_rtfs([0.0345, 0.0978, 0.0786], 20.0, 0.0)
    text = report.to_text()
    assert [line.split(":")[0] for line in text.splitlines()] == list(REPORT_KEYS)
    assert LatencyReport.from_text(text) == report


def test_report_rejects_unknown_keys():
    with pytest.raises(ValidationError):
        LatencyReport.from_text("bogus_ms: 1.0\n")


def test_collector_report():
    collector = LatencyCollector()
    collector.record("content", 4.0)
    collector.record("main", 8.0)
    collector.record("vocoder", 2.0)
    collector.add_audio(80.0)
    report = collector.report(chunk_ms=80.0, right_context_ms=0.0)
    assert report.content_rtf == pytest.approx(0.05)
    assert report.main_ms == pytest.approx(8.0)
    assert report.overall_ms == pytest.approx(94.0)
    assert collector.chunks == 1
    assert collector.audio_ms == 80.0


def test_collector_needs_a_chunk():
    with pytest.raises(LatencyError):
        LatencyCollector().report(chunk_ms=20.0, right_context_ms=0.0)


def test_collector_rejects_unknown_stage():
    with pytest.raises(LatencyError):
        LatencyCollector().record("decoder", 1.0)


def test_stage_timer_records():
    collector = LatencyCollector()
    with collector.stage("main"):
        pass
    timings = {timing.name: timing for timing in collector.stage_timings()}
    assert timings["main"].chunks == 1
    assert timings["main"].total_ms >= 0.0
    assert timings["content"].chunks == 0
    assert timings["content"].mean_ms == 0.0
