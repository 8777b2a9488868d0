"""
Signal core: the mono audio buffer and its primitive operations.
"""

from roomsense.dsp.signal import (
    PeakNormalization,
    Signal,
    convolve,
    downmix,
    load_wav,
    mean_power,
    normalize_peak,
    resample,
    write_wav,
)

__all__ = [
    "Signal",
    "PeakNormalization",
    "load_wav",
    "write_wav",
    "downmix",
    "resample",
    "normalize_peak",
    "convolve",
    "mean_power",
]
