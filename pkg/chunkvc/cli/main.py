"""CLI entrypoint for chunkvc."""

from __future__ import annotations

from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import typer

from chunkvc.config import ConfigLoader, ModelConfig, preset_config, with_setting
from chunkvc.config.schema import LoggingConfig, ObservabilityConfig
from chunkvc.dsp.wav import PcmAudio, load_wav, write_wav
from chunkvc.exceptions import (
    AudioFormatError,
    ChunkVCError,
    ConfigError,
    ModelFileError,
)
from chunkvc.metrics.models import LatencyReport
from chunkvc.model_io import init_weights, load_model, save_model
from chunkvc.pipeline import ConversionModel, StreamSession, stream_convert
from chunkvc.utils.logging import setup_logging
from chunkvc.verification import run_probes

app = typer.Typer(name="chunkvc", help="chunkvc - chunkwise streaming voice conversion")

EXIT_VALIDATION = 1
EXIT_IO = 2


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Map library errors onto exit codes: 1 for validation, 2 for I/O and formats."""
    try:
        yield
    except (AudioFormatError, ModelFileError, OSError) as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_IO) from exc
    except ChunkVCError as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_VALIDATION) from exc


@app.callback()
def main(
    log_level: str = typer.Option("WARNING", "--log-level", help="DEBUG, INFO, WARNING, ERROR"),
    log_format: str = typer.Option("console", "--log-format", help="console or json"),
) -> None:
    """Configure logging for every command."""
    level = log_level.upper()
    if level not in {"DEBUG", "INFO", "WARNING", "ERROR"} or log_format not in {"console", "json"}:
        typer.echo(f"error: invalid logging options {log_level!r}/{log_format!r}", err=True)
        raise typer.Exit(EXIT_VALIDATION)
    setup_logging(ObservabilityConfig(logging=LoggingConfig(level=level, format=log_format)))


def _schedule(cfg: ModelConfig, setting: str | None, chunk_ms: int | None) -> ModelConfig:
    if setting is None and chunk_ms is None:
        return cfg
    updated = with_setting(cfg, setting or cfg.session.setting, chunk_ms=chunk_ms)
    return ConfigLoader().ensure_valid(updated)


def _write_report(report: LatencyReport, path: Path | None) -> None:
    if path is not None:
        Path(path).write_text(report.to_text(), encoding="utf-8")


@app.command("init-weights")
def init_weights_command(
    out: Path = typer.Option(..., "--out", help="Destination .cnvc file"),
    config: Path | None = typer.Option(None, "--config", "-c", help="YAML model config"),
    seed: int = typer.Option(0, "--seed", help="Weight seed"),
    setting: str = typer.Option("full", "--setting", help="Preset when no --config is given"),
) -> None:
    """Write a seeded, randomly initialized model."""
    with _exit_codes():
        if config is not None:
            cfg = ConfigLoader().load(config)
        else:
            if setting not in {"full", "fast"}:
                raise ConfigError(f"Unknown setting: {setting}")
            cfg = preset_config(setting)
        weights = init_weights(cfg, seed)
        save_model(cfg, weights, out)
    typer.echo(f"Wrote {len(weights)} tensors to {out}")


@app.command()
def convert(
    model: Path = typer.Option(..., "--model", "-m", help="Model .cnvc file"),
    source: Path = typer.Option(..., "--source", help="Source speech WAV"),
    reference: Path = typer.Option(..., "--reference", help="Target speaker WAV"),
    out: Path = typer.Option(..., "--out", help="Output WAV"),
    setting: str | None = typer.Option(None, "--setting", help="full or fast"),
    chunk_ms: int | None = typer.Option(None, "--chunk-ms", help="Chunk size in ms"),
    report: Path | None = typer.Option(None, "--report", help="Latency report file"),
    parallel: bool | None = typer.Option(
        None, "--parallel/--sequential", help="Run stages on separate threads"
    ),
) -> None:
    """Convert a source utterance to the reference speaker, chunk by chunk."""
    with _exit_codes():
        cfg, weights = load_model(model)
        cfg = _schedule(cfg, setting, chunk_ms)
        source_audio = load_wav(source)
        reference_audio = load_wav(reference)
        session = StreamSession(ConversionModel(cfg, weights), parallel=parallel)
        session.prepare_reference(reference_audio)
        converted = stream_convert(session, source_audio)
        write_wav(converted, out)
        latency = session.latency_report() if session.chunks_processed else None
        if latency is not None:
            _write_report(latency, report)
    typer.echo(f"Wrote {len(converted)} samples to {out}")
    if latency is not None:
        typer.echo(f"Overall latency {latency.overall_ms:.2f} ms, RTF {latency.overall_rtf:.3f}")


@app.command()
def bench(
    model: Path = typer.Option(..., "--model", "-m", help="Model .cnvc file"),
    seconds: int = typer.Option(5, "--seconds", min=1, help="Seconds of input audio"),
    setting: str | None = typer.Option(None, "--setting", help="full or fast"),
    report: Path | None = typer.Option(None, "--report", help="Latency report file"),
    seed: int = typer.Option(0, "--seed", help="Noise seed"),
    parallel: bool | None = typer.Option(
        None, "--parallel/--sequential", help="Run stages on separate threads"
    ),
) -> None:
    """Stream seeded noise through the model and print the latency report."""
    with _exit_codes():
        cfg, weights = load_model(model)
        cfg = _schedule(cfg, setting, None)
        rng = np.random.default_rng(seed)
        rate = cfg.mel.sample_rate
        noise_ref = (0.1 * rng.standard_normal(rate)).astype(np.float32)
        noise_src = (0.1 * rng.standard_normal(seconds * rate)).astype(np.float32)
        session = StreamSession(ConversionModel(cfg, weights), parallel=parallel)
        session.prepare_reference(PcmAudio(rate, noise_ref))
        stream_convert(session, PcmAudio(rate, noise_src))
        latency = session.latency_report()
        _write_report(latency, report)
    typer.echo(latency.to_text().rstrip())
    for timing in session.stage_timings():
        typer.echo(
            f"{timing.name}: {timing.chunks} chunks, "
            f"mean {timing.mean_ms:.2f} ms, p95 {timing.p95_ms:.2f} ms per chunk"
        )


@app.command()
def verify(
    model: Path = typer.Option(..., "--model", "-m", help="Model .cnvc file"),
    seed: int = typer.Option(0, "--seed", help="Probe seed"),
) -> None:
    """Run the built-in property probes; exit 1 if any fails."""
    with _exit_codes():
        cfg, weights = load_model(model)
        results = run_probes(ConversionModel(cfg, weights), seed=seed)
    for result in results:
        verdict = "PASS" if result.passed else "FAIL"
        typer.echo(f"{verdict} {result.name}: {result.detail}")
    if not all(result.passed for result in results):
        raise typer.Exit(EXIT_VALIDATION)


if __name__ == "__main__":
    app()
