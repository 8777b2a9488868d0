"""
Speech Transmission Index from a room impulse response (indirect MTF method).

The RIR is split into seven octave bands (125 Hz to 8 kHz). For every band the
modulation transfer function is read off the squared band envelope at 14 modulation
frequencies, mapped to an apparent SNR, clipped to +/-15 dB and turned into
transmission indices. Band MTIs are combined with male-speech weights.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from scipy import signal as sps

from roomsense.dsp.signal import Signal
from roomsense.errors import AllZeroRir, SampleRateMismatch

logger = logging.getLogger(__name__)

OCTAVE_CENTERS: Tuple[float, ...] = (125.0, 250.0, 500.0, 1000.0, 2000.0, 4000.0, 8000.0)
MODULATION_FREQUENCIES: Tuple[float, ...] = (
    0.63, 0.8, 1.0, 1.25, 1.6, 2.0, 2.5, 3.15, 4.0, 5.0, 6.3, 8.0, 10.0, 12.5,
)

# Male-speech band weights in percent; they sum to exactly 100.
MALE_WEIGHTS_PCT = np.array([13, 14, 11, 12, 19, 17, 14], dtype=np.int64)

# Revised weighting with adjacent-band redundancy terms; sum(alpha) - sum(beta) == 1.
MALE_ALPHA = np.array([0.085, 0.127, 0.230, 0.233, 0.309, 0.224, 0.173])
MALE_BETA = np.array([0.085, 0.078, 0.065, 0.011, 0.047, 0.095])

WEIGHTINGS = ("male", "male_redundancy")

SNR_CLIP_DB = 15.0
FILTER_ORDER = 4
MIN_ANALYSIS_SECONDS = 1.6
LEAD_SECONDS = 0.1

# A band holding less than this share of the total energy is treated as silent.
SILENT_BAND_RELATIVE = 1e-12


@dataclass(frozen=True)
class StiAnalysis:
    """STI together with the per-band intermediate values it was built from."""

    sti: float
    mti: np.ndarray
    mtf: np.ndarray
    silent_bands: List[float] = field(default_factory=list)

    @property
    def band_silent(self) -> bool:
        return bool(self.silent_bands)


def _band_edges(center: float) -> Tuple[float, float]:
    return center / np.sqrt(2.0), center * np.sqrt(2.0)


@lru_cache(maxsize=16)
def _octave_filters(rate: int) -> Tuple[np.ndarray, ...]:
    """Butterworth second-order sections per octave band; bands above Nyquist become high-passes."""
    nyquist = rate / 2.0
    filters = []
    for center in OCTAVE_CENTERS:
        low, high = _band_edges(center)
        if low >= nyquist:
            raise SampleRateMismatch(
                f"{rate} Hz cannot represent the {center:.0f} Hz octave band; analyse at 16 kHz"
            )
        if high >= nyquist:
            sos = sps.butter(FILTER_ORDER, low, btype="highpass", fs=rate, output="sos")
        else:
            sos = sps.butter(FILTER_ORDER, [low, high], btype="bandpass", fs=rate, output="sos")
        filters.append(sos)
    return tuple(filters)


def _pad(data: np.ndarray, rate: int) -> np.ndarray:
    lead = int(round(LEAD_SECONDS * rate))
    total = max(lead + data.shape[0], int(np.ceil(MIN_ANALYSIS_SECONDS * rate)))
    padded = np.zeros(total, dtype=np.float64)
    padded[lead : lead + data.shape[0]] = data
    return padded


def _band_envelopes(padded: np.ndarray, rate: int) -> np.ndarray:
    """Squared zero-phase octave-band signals, shape (7, n)."""
    bands = [sps.sosfiltfilt(sos, padded, padtype=None) for sos in _octave_filters(rate)]
    return np.square(np.vstack(bands))


def _modulation_depths(envelopes: np.ndarray, rate: int) -> np.ndarray:
    """|sum e(t) exp(-j 2 pi F t)| / sum e(t) per band and modulation frequency, shape (7, 14)."""
    t = np.arange(envelopes.shape[1]) / rate
    kernel = np.exp(-2j * np.pi * np.outer(MODULATION_FREQUENCIES, t))
    energy = envelopes.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        depths = np.abs(envelopes @ kernel.T) / energy
    return np.nan_to_num(depths, nan=0.0, posinf=0.0)


@lru_cache(maxsize=8)
def _filterbank_mtf(n: int, rate: int) -> np.ndarray:
    """MTF of the analysis filterbank itself, measured on a unit impulse of the same padded length."""
    impulse = _pad(np.ones(1), rate)
    impulse = np.pad(impulse, (0, n - impulse.shape[0]))
    depths = _modulation_depths(_band_envelopes(impulse, rate), rate)
    depths.setflags(write=False)
    return depths


def sti_from_mtf(mtf: np.ndarray, weighting: str = "male") -> float:
    """
    Collapse a (7, 14) modulation transfer matrix into an STI value.

    Args:
        mtf: Modulation depths in [0, 1], bands by modulation frequency
        weighting: "male" (plain band weights) or "male_redundancy"

    Returns:
        STI in [0, 1]
    """
    mtf = np.asarray(mtf, dtype=np.float64)
    if mtf.shape != (len(OCTAVE_CENTERS), len(MODULATION_FREQUENCIES)):
        raise ValueError(f"MTF must have shape (7, 14), got {mtf.shape}")
    return _combine_bands(_transmission_indices(mtf), weighting)


def _transmission_indices(mtf: np.ndarray) -> np.ndarray:
    """Per-band MTI (mean transmission index over modulation frequencies)."""
    m = np.clip(mtf, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        snr_app = 10.0 * np.log10(m / (1.0 - m))
    snr_app = np.clip(np.nan_to_num(snr_app, nan=-SNR_CLIP_DB), -SNR_CLIP_DB, SNR_CLIP_DB)
    ti = (snr_app + SNR_CLIP_DB) / (2.0 * SNR_CLIP_DB)
    return ti.mean(axis=1)


def _combine_bands(mti: np.ndarray, weighting: str) -> float:
    if weighting == "male":
        value = float(np.dot(MALE_WEIGHTS_PCT, mti) / 100.0)
    elif weighting == "male_redundancy":
        value = float(np.dot(MALE_ALPHA, mti) - np.dot(MALE_BETA, np.sqrt(mti[:-1] * mti[1:])))
    else:
        raise ValueError(f"Unknown STI weighting '{weighting}'. Valid: {WEIGHTINGS}")
    return float(np.clip(value, 0.0, 1.0))


def sti_analysis(h: Signal, weighting: str = "male") -> StiAnalysis:
    """
    Full STI computation with per-band detail.

    Silent bands get an MTI of 0 and are reported in `silent_bands` instead of raising.

    Raises:
        AllZeroRir: If the RIR carries no energy
        SampleRateMismatch: If the rate is too low for the 8 kHz octave
    """
    data = h.as_float64()
    if data.size == 0 or not np.any(data):
        raise AllZeroRir("Impulse response is empty or all zero")

    padded = _pad(data, h.sample_rate)
    envelopes = _band_envelopes(padded, h.sample_rate)
    depths = _modulation_depths(envelopes, h.sample_rate)
    reference = _filterbank_mtf(padded.shape[0], h.sample_rate)
    with np.errstate(invalid="ignore", divide="ignore"):
        mtf = np.where(reference > 0, depths / reference, 0.0)
    mtf = np.clip(mtf, 0.0, 1.0)

    mti = _transmission_indices(mtf)

    band_energy = envelopes.sum(axis=1)
    silent = band_energy < SILENT_BAND_RELATIVE * float(np.sum(padded**2))
    silent_bands = [OCTAVE_CENTERS[i] for i in np.flatnonzero(silent)]
    if silent_bands:
        logger.warning(f"Octave bands {silent_bands} carry no energy; their MTI is set to 0")
        mti = np.where(silent, 0.0, mti)
        mtf = np.where(silent[:, None], 0.0, mtf)

    return StiAnalysis(
        sti=_combine_bands(mti, weighting), mti=mti, mtf=mtf, silent_bands=silent_bands
    )


def compute_sti(h: Signal, weighting: str = "male") -> float:
    """STI of an onset-aligned RIR, in [0, 1]."""
    return sti_analysis(h, weighting).sti
