"""
Seeded noise sources: white, pink and real-noise recordings.
"""

import logging
from typing import Optional

import numpy as np
from scipy import signal as sps

from roomsense.dsp.signal import Signal, load_wav, resample
from roomsense.errors import EmptySignal
from roomsense.models.manifest import NoiseKind, NoiseSpec

logger = logging.getLogger(__name__)

# Parallel bank of first-order sections whose sum approximates a 1/f spectrum
# (Paul Kellet's refined pink filter). Each row is (pole, input gain).
PINK_SECTIONS = (
    (0.99886, 0.0555179),
    (0.99332, 0.0750759),
    (0.96900, 0.1538520),
    (0.86650, 0.3104856),
    (0.55000, 0.5329522),
    (-0.7616, -0.0168980),
)
PINK_DIRECT_GAIN = 0.5362
PINK_DELAYED_GAIN = 0.115926

# Samples discarded while the slowest section settles.
PINK_WARMUP = 8192


def _check_length(n: int) -> None:
    if n <= 0:
        raise ValueError(f"Sample count must be positive, got {n}")


def gen_white(n: int, seed: int, rate: int) -> Signal:
    """I.i.d. standard Gaussian noise; a pure function of (n, seed, rate)."""
    _check_length(n)
    rng = np.random.default_rng(seed)
    return Signal(rng.standard_normal(n), rate)


def gen_pink(n: int, seed: int, rate: int) -> Signal:
    """
    Pink (-3 dB/octave) noise scaled to unit mean power.

    White Gaussian noise is passed through PINK_SECTIONS in parallel plus a direct and
    a one-sample-delayed tap. The first PINK_WARMUP output samples are dropped so the
    returned block starts in steady state.
    """
    _check_length(n)
    rng = np.random.default_rng(seed)
    white = rng.standard_normal(n + PINK_WARMUP)

    pink = PINK_DIRECT_GAIN * white
    for pole, gain in PINK_SECTIONS:
        pink = pink + sps.lfilter([gain], [1.0, -pole], white)
    pink = pink + sps.lfilter([0.0, PINK_DELAYED_GAIN], [1.0], white)

    pink = pink[PINK_WARMUP:]
    pink = pink / np.sqrt(np.mean(pink**2))
    return Signal(pink, rate)


def fit_noise_length(noise: Signal, n: int, seed: Optional[int]) -> Signal:
    """
    Cut exactly `n` samples out of `noise`, starting at a seeded random offset.

    Recordings shorter than `n` are tiled (concatenated with themselves) first.
    """
    _check_length(n)
    data = noise.as_float64()
    length = data.shape[0]
    if length == 0:
        raise EmptySignal("Noise recording is empty")

    rng = np.random.default_rng(seed)
    if length >= n:
        offset = int(rng.integers(0, length - n + 1))
        return Signal(data[offset : offset + n], noise.sample_rate)

    offset = int(rng.integers(0, length))
    reps = -(-(offset + n) // length)
    tiled = np.tile(data, reps)
    logger.debug(f"Tiled {length}-sample noise {reps}x to cover {n} samples")
    return Signal(tiled[offset : offset + n], noise.sample_rate)


def load_noise(spec: NoiseSpec, n: int, rate: int) -> Optional[Signal]:
    """
    Materialize the noise described by `spec` as an `n`-sample signal at `rate`.

    Returns:
        The noise signal, or None for NoiseKind.NONE
    """
    if spec.kind == NoiseKind.NONE:
        return None
    if spec.kind == NoiseKind.WHITE:
        return gen_white(n, spec.seed, rate)
    if spec.kind == NoiseKind.PINK:
        return gen_pink(n, spec.seed, rate)

    recording = load_wav(spec.source)
    if recording.sample_rate != rate:
        recording = resample(recording, rate)
    return fit_noise_length(recording, n, spec.seed)
