"""Built-in property probes."""

from chunkvc.verification.probes import PROBES, ProbeResult, run_probes

__all__ = ["PROBES", "ProbeResult", "run_probes"]
