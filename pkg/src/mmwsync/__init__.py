"""Link-level simulator for directional frame-timing synchronization in
quantized wideband mmWave OFDM systems."""

from . import (
    beamforming,
    channel,
    cli,
    detector,
    montecarlo,
    optimizer,
    quantization,
    sqnr,
    waveform,
)

__version__ = "0.1.0"

__all__ = [
    "beamforming",
    "channel",
    "cli",
    "detector",
    "montecarlo",
    "optimizer",
    "quantization",
    "sqnr",
    "waveform",
    "__version__",
]
