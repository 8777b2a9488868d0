"""
Mono audio buffer and the primitive operations every other stage builds on:
WAV I/O, resampling, peak normalization, convolution and power.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import NamedTuple, Union

import numpy as np
import soundfile as sf
from scipy import signal as sps

from roomsense.errors import (
    CorruptHeader,
    EmptySignal,
    SampleRateMismatch,
    UnsupportedFormat,
)

logger = logging.getLogger(__name__)

# WAV containers and sample encodings accepted by load_wav().
SUPPORTED_CONTAINERS = {"WAV", "WAVEX"}
SUPPORTED_SUBTYPES = {"PCM_16", "PCM_24", "PCM_32", "FLOAT"}

# Windowed-sinc design: Kaiser window, cutoff at 0.95 of the lower Nyquist,
# RESAMPLE_ZERO_CROSSINGS sinc lobes on each side of the centre tap.
RESAMPLE_CUTOFF = 0.95
RESAMPLE_KAISER_BETA = 8.0
RESAMPLE_ZERO_CROSSINGS = 100

# Above this many multiply-adds convolve() switches to the FFT path.
FFT_CONVOLVE_THRESHOLD = 1 << 16


@dataclass(frozen=True)
class Signal:
    """
    Immutable mono buffer of float32 samples.

    Samples are copied on construction and the copy is marked read-only, so a Signal
    can be shared across threads and processes without defensive copies.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        data = np.array(self.samples, dtype=np.float32, copy=True).reshape(-1)
        if int(self.sample_rate) <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(data)):
            raise ValueError("Signal samples must be finite")
        data.setflags(write=False)
        object.__setattr__(self, "samples", data)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    @property
    def duration_seconds(self) -> float:
        return len(self) / self.sample_rate

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self), dtype=np.float64) / self.sample_rate

    def as_float64(self) -> np.ndarray:
        return self.samples.astype(np.float64)

    def slice(self, start: int, stop: int) -> "Signal":
        return Signal(self.samples[start:stop], self.sample_rate)

    def is_silent(self) -> bool:
        return not np.any(self.samples)


class PeakNormalization(NamedTuple):
    """Result of normalize_peak: the scaled signal and whether the input was silent."""

    signal: Signal
    silent: bool


def downmix(frames: np.ndarray) -> np.ndarray:
    """Average channels of a (samples, channels) array into one channel."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim == 1:
        return frames
    return frames.mean(axis=1)


def load_wav(path: Union[str, Path]) -> Signal:
    """
    Read a WAV file into a mono Signal at its native sample rate.

    Args:
        path: Path to a PCM 16/24/32-bit or 32-bit float WAV file

    Returns:
        Signal with channels averaged and integer samples mapped to [-1, 1)

    Raises:
        FileNotFoundError: If the path does not exist
        UnsupportedFormat: If the file is not a supported WAV flavour
        CorruptHeader: If libsndfile cannot parse the header
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")

    try:
        info = sf.info(str(path))
    except (RuntimeError, sf.LibsndfileError) as e:
        raise CorruptHeader(f"Cannot parse audio header of {path}: {e}") from e

    if info.format not in SUPPORTED_CONTAINERS or info.subtype not in SUPPORTED_SUBTYPES:
        raise UnsupportedFormat(f"{path}: {info.format}/{info.subtype} is not a supported WAV type")

    try:
        frames, rate = sf.read(str(path), dtype="float64", always_2d=True)
    except (RuntimeError, sf.LibsndfileError) as e:
        raise CorruptHeader(f"Cannot decode {path}: {e}") from e

    return Signal(downmix(frames), rate)


def write_wav(s: Signal, path: Union[str, Path]) -> Path:
    """Write a Signal as a mono FLOAT32 WAV file at its own sample rate."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sf.write(str(path), s.samples, s.sample_rate, format="WAV", subtype="FLOAT")
    return path


@lru_cache(maxsize=32)
def _resampling_filter(up: int, down: int) -> np.ndarray:
    max_rate = max(up, down)
    half_len = RESAMPLE_ZERO_CROSSINGS * max_rate
    taps = sps.firwin(
        2 * half_len + 1,
        RESAMPLE_CUTOFF / max_rate,
        window=("kaiser", RESAMPLE_KAISER_BETA),
    )
    taps.setflags(write=False)
    return taps


def resample(s: Signal, target_rate: int) -> Signal:
    """
    Polyphase windowed-sinc resampling.

    Output length is round(len(s) * target_rate / s.sample_rate); content is
    band-limited below 0.95 of the lower of the two Nyquist frequencies.
    """
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}")
    if target_rate == s.sample_rate:
        return s

    ratio = Fraction(int(target_rate), s.sample_rate)
    up, down = ratio.numerator, ratio.denominator
    n_out = int(round(len(s) * target_rate / s.sample_rate))

    if len(s) == 0:
        return Signal(np.zeros(0, dtype=np.float32), target_rate)

    taps = np.array(_resampling_filter(up, down))
    out = sps.resample_poly(s.as_float64(), up, down, window=taps)
    if out.shape[0] < n_out:
        out = np.pad(out, (0, n_out - out.shape[0]))
    return Signal(out[:n_out], target_rate)


def normalize_peak(s: Signal) -> PeakNormalization:
    """Scale so that max |sample| == 1; silent input comes back unchanged and flagged."""
    data = s.as_float64()
    peak = float(np.max(np.abs(data))) if data.size else 0.0
    if peak == 0.0:
        return PeakNormalization(s, True)
    return PeakNormalization(Signal(data / peak, s.sample_rate), False)


def convolve(x: Signal, h: Signal) -> Signal:
    """
    Full linear convolution of two signals at the same rate.

    Long inputs go through the FFT; short ones are summed directly. Both paths
    accumulate in float64.
    """
    if x.sample_rate != h.sample_rate:
        raise SampleRateMismatch(f"Cannot convolve {x.sample_rate} Hz with {h.sample_rate} Hz")
    if len(x) == 0 or len(h) == 0:
        raise EmptySignal("convolve() needs two non-empty signals")

    a, b = x.as_float64(), h.as_float64()
    if len(a) * len(b) > FFT_CONVOLVE_THRESHOLD and min(len(a), len(b)) > 1:
        y = sps.fftconvolve(a, b, mode="full")
    else:
        y = np.convolve(a, b, mode="full")
    return Signal(y, x.sample_rate)


def mean_power(s: Signal) -> float:
    """Mean of squared samples, accumulated in float64."""
    if len(s) == 0:
        raise EmptySignal("mean_power() of an empty signal")
    data = s.as_float64()
    return float(np.mean(data * data))
