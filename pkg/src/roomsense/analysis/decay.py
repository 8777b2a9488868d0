"""
Energy-based RIR parameters: onset alignment, Schroeder decay, RT60 and
early/late energy ratios (DRR, C50, C80).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from roomsense.dsp.signal import Signal
from roomsense.errors import (
    AllZeroRir,
    DegenerateFit,
    InsufficientDecayRange,
    ZeroLateEnergy,
)

logger = logging.getLogger(__name__)

DEFAULT_ONSET_THRESHOLD = 0.05
DEFAULT_DB_FLOOR = -120.0

# Regression window of the decay fit; RT60 = 2 x the 30 dB traverse time.
FIT_UPPER_DB = -5.0
FIT_LOWER_DB = -35.0
MIN_FIT_POINTS = 10

# Late energy below this share of the total counts as zero.
ZERO_LATE_RELATIVE = 1e-12


@dataclass(frozen=True)
class DecayCurve:
    """Schroeder energy decay curve in dB, one point per RIR sample."""

    times: np.ndarray
    levels: np.ndarray
    floor_db: float = DEFAULT_DB_FLOOR

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        levels = np.asarray(self.levels, dtype=np.float64)
        if times.shape != levels.shape:
            raise ValueError("times and levels must have the same shape")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "levels", levels)

    @classmethod
    def from_slope(cls, slope_db_per_s: float, duration: float, rate: int) -> "DecayCurve":
        """Straight-line decay starting at 0 dB."""
        times = np.arange(int(round(duration * rate))) / rate
        return cls(times, slope_db_per_s * times)


def align_onset(h: Signal, threshold: float = DEFAULT_ONSET_THRESHOLD) -> Signal:
    """Drop everything before the first sample reaching `threshold` x the absolute peak."""
    data = np.abs(h.as_float64())
    if data.size == 0 or not np.any(data):
        raise AllZeroRir("Impulse response is empty or all zero")
    onset = int(np.argmax(data >= threshold * data.max()))
    if onset == 0:
        return h
    return h.slice(onset, len(h))


def schroeder_decay(h: Signal, floor_db: float = DEFAULT_DB_FLOOR) -> DecayCurve:
    """
    Backward-integrated energy decay curve.

    levels[k] = 10 log10(sum_{i>=k} h[i]^2 / sum_i h[i]^2), floored at `floor_db`.
    """
    energy = h.as_float64() ** 2
    if energy.size == 0 or not np.any(energy):
        raise AllZeroRir("Impulse response is empty or all zero")

    # cumsum over non-negative terms is non-decreasing, so the reversed tail is
    # non-increasing sample by sample.
    tail = np.cumsum(energy[::-1])[::-1]
    with np.errstate(divide="ignore"):
        levels = 10.0 * np.log10(tail / tail[0])
    levels = np.maximum(levels, floor_db)
    levels[0] = 0.0
    return DecayCurve(h.times, levels, floor_db)


def estimate_rt60(d: DecayCurve) -> float:
    """
    Reverberation time from a least-squares line over the [-35, -5] dB span.

    Returns:
        RT60 in seconds, i.e. twice the time the fitted line needs to fall 30 dB

    Raises:
        InsufficientDecayRange: If the curve never decays through -35 dB
        DegenerateFit: If fewer than MIN_FIT_POINTS samples fall inside the window
    """
    levels = d.levels
    reached = np.any((levels <= FIT_LOWER_DB) & (levels > d.floor_db))
    if not reached:
        raise InsufficientDecayRange(
            f"Decay curve bottoms out at {levels.min():.1f} dB without decaying through "
            f"{FIT_LOWER_DB:.0f} dB"
        )

    window = (levels <= FIT_UPPER_DB) & (levels >= FIT_LOWER_DB)
    n_points = int(np.count_nonzero(window))
    if n_points < MIN_FIT_POINTS:
        raise DegenerateFit(f"Only {n_points} points inside the regression window")

    A = np.vstack([d.times[window], np.ones(n_points)]).T
    slope, _ = np.linalg.lstsq(A, levels[window], rcond=None)[0]
    if slope >= 0:
        raise DegenerateFit(f"Fitted decay slope is non-negative ({slope:.3g} dB/s)")
    return float(2.0 * (-30.0 / slope))


def split_index(split_ms: float, rate: int) -> int:
    """Number of samples with t_i < split; the boundary sample belongs to the late window."""
    return int(math.ceil(round(split_ms * rate / 1000.0, 9)))


def energy_ratio(h: Signal, split_ms: float, total: Optional[float] = None) -> float:
    """
    Early-to-late energy ratio in dB around `split_ms`.

    Raises:
        AllZeroRir: If the RIR carries no energy
        ZeroLateEnergy: If late energy is below 1e-12 of the total
    """
    energy = h.as_float64() ** 2
    total = float(energy.sum()) if total is None else total
    if total <= 0.0:
        raise AllZeroRir("Impulse response is empty or all zero")

    n_early = split_index(split_ms, h.sample_rate)
    early = float(energy[:n_early].sum())
    late = float(energy[n_early:].sum())
    if late < ZERO_LATE_RELATIVE * total:
        raise ZeroLateEnergy(f"No energy after {split_ms} ms")
    if early <= 0.0:
        return DEFAULT_DB_FLOOR
    return float(10.0 * np.log10(early / late))
