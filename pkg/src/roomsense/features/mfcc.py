"""
MFCC front-end: the network's input representation.

Per frame: periodic Hann window, zero-pad to fft_size, power spectrum, area-normalized
mel filterbank, log10 with a floor, orthonormal DCT-II, first num_coeffs coefficients.
Frames start at sample 0 (no centre padding).
"""

import hashlib
import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import librosa
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from pydantic import BaseModel, Field, model_validator
from scipy import fft as spfft
from scipy import signal as sps

from roomsense.dsp.signal import Signal
from roomsense.errors import EmptySplit, SampleRateMismatch, ShapeMismatch, SignalTooShort

logger = logging.getLogger(__name__)

FINGERPRINT_BYTES = 16
MIN_FEATURE_STD = 1e-6


class MfccConfig(BaseModel):
    """MFCC analysis parameters; frozen so it can key caches and fingerprints."""

    model_config = {"frozen": True}

    sample_rate: int = Field(16000, gt=0, description="Input sample rate in Hz")
    frame_length: int = Field(400, gt=0, description="Frame length in samples (25 ms)")
    hop: int = Field(160, gt=0, description="Frame step in samples (10 ms)")
    fft_size: int = Field(512, gt=0)
    mel_bands: int = Field(40, gt=0)
    num_coeffs: int = Field(32, gt=0)
    fmin: float = Field(0.0, ge=0)
    fmax: float = Field(8000.0, gt=0)
    log_floor: float = Field(1e-10, gt=0)

    @model_validator(mode="after")
    def check_consistency(self) -> "MfccConfig":
        if self.frame_length > self.fft_size:
            raise ValueError("frame_length must not exceed fft_size")
        if self.num_coeffs > self.mel_bands:
            raise ValueError("num_coeffs must not exceed mel_bands")
        if self.fmax > self.sample_rate / 2:
            raise ValueError("fmax must not exceed the Nyquist frequency")
        if self.fmin >= self.fmax:
            raise ValueError("fmin must be below fmax")
        return self

    def fingerprint(self) -> bytes:
        """16-byte digest of the canonical JSON form of this config."""
        canonical = json.dumps(self.model_dump(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).digest()[:FINGERPRINT_BYTES]

    def n_frames(self, n_samples: int) -> int:
        """1 + floor((n - frame_length) / hop), or 0 when shorter than one frame."""
        if n_samples < self.frame_length:
            return 0
        return 1 + (n_samples - self.frame_length) // self.hop


@dataclass(frozen=True)
class FeatureMatrix:
    """(frames, num_coeffs) float32 features tagged with the config that produced them."""

    values: np.ndarray
    fingerprint: bytes

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float32)
        if values.ndim != 2:
            raise ShapeMismatch(f"Feature matrix must be 2-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("Feature values must be finite")
        if len(self.fingerprint) != FINGERPRINT_BYTES:
            raise ValueError(f"Fingerprint must be {FINGERPRINT_BYTES} bytes")
        object.__setattr__(self, "values", values)

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True)
class FeatureStats:
    """Per-coefficient mean and standard deviation (float64)."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        std = np.asarray(self.std, dtype=np.float64)
        if mean.shape != std.shape or mean.ndim != 1:
            raise ShapeMismatch("mean and std must be 1-D and of equal length")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @classmethod
    def identity(cls, n: int) -> "FeatureStats":
        return cls(np.zeros(n), np.ones(n))

    def to_dict(self):
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, data) -> "FeatureStats":
        return cls(np.array(data["mean"]), np.array(data["std"]))


@lru_cache(maxsize=8)
def mel_filterbank(cfg: MfccConfig) -> np.ndarray:
    """(mel_bands, fft_size // 2 + 1) triangular filters with Slaney area normalization."""
    fb = librosa.filters.mel(
        sr=cfg.sample_rate,
        n_fft=cfg.fft_size,
        n_mels=cfg.mel_bands,
        fmin=cfg.fmin,
        fmax=cfg.fmax,
        norm="slaney",
        dtype=np.float64,
    )
    fb.setflags(write=False)
    return fb


@lru_cache(maxsize=8)
def _window(frame_length: int) -> np.ndarray:
    w = sps.get_window("hann", frame_length, fftbins=True)
    w.setflags(write=False)
    return w


def frame_signal(data: np.ndarray, cfg: MfccConfig) -> np.ndarray:
    """Windowed frames, shape (n_frames, frame_length)."""
    frames = sliding_window_view(data, cfg.frame_length)[:: cfg.hop]
    return frames * _window(cfg.frame_length)


def power_spectrum(frames: np.ndarray, fft_size: int) -> np.ndarray:
    """|rfft|^2 of each frame zero-padded to fft_size (no 1/N scaling)."""
    spectrum = spfft.rfft(frames, n=fft_size, axis=-1)
    return spectrum.real**2 + spectrum.imag**2


def _check_input(s: Signal, cfg: MfccConfig) -> None:
    if s.sample_rate != cfg.sample_rate:
        raise SampleRateMismatch(f"Signal at {s.sample_rate} Hz, config expects {cfg.sample_rate} Hz")
    if len(s) < cfg.frame_length:
        raise SignalTooShort(f"{len(s)} samples is shorter than one {cfg.frame_length}-sample frame")


def log_mel(s: Signal, cfg: MfccConfig) -> np.ndarray:
    """Floored log10 mel energies, shape (n_frames, mel_bands), float64."""
    _check_input(s, cfg)
    power = power_spectrum(frame_signal(s.as_float64(), cfg), cfg.fft_size)
    mel = power @ mel_filterbank(cfg).T
    return np.log10(np.maximum(mel, cfg.log_floor))


def compute_mfcc(s: Signal, cfg: MfccConfig = MfccConfig()) -> FeatureMatrix:
    """
    MFCC matrix of a signal.

    Raises:
        SampleRateMismatch: If the signal rate differs from cfg.sample_rate
        SignalTooShort: If the signal is shorter than one frame
    """
    cepstra = spfft.dct(log_mel(s, cfg), type=2, norm="ortho", axis=-1)
    return FeatureMatrix(cepstra[:, : cfg.num_coeffs], cfg.fingerprint())


def compute_feature_stats(matrices: Sequence[FeatureMatrix]) -> FeatureStats:
    """
    Per-coefficient statistics pooled over every frame of every matrix.

    Raises:
        EmptySplit: If no matrices are given
        ShapeMismatch: If the matrices disagree on coefficient count
    """
    if not matrices:
        raise EmptySplit("Cannot compute feature statistics over zero matrices")
    widths = {m.shape[1] for m in matrices}
    if len(widths) != 1:
        raise ShapeMismatch(f"Feature matrices have differing widths {sorted(widths)}")

    width = widths.pop()
    total = np.zeros(width)
    total_sq = np.zeros(width)
    count = 0
    for m in matrices:
        v = m.values.astype(np.float64)
        total += v.sum(axis=0)
        count += v.shape[0]
    mean = total / count
    for m in matrices:
        v = m.values.astype(np.float64) - mean
        total_sq += (v * v).sum(axis=0)
    std = np.maximum(np.sqrt(total_sq / count), MIN_FEATURE_STD)
    return FeatureStats(mean, std)


def standardize(f: FeatureMatrix, stats: FeatureStats) -> FeatureMatrix:
    """Per-coefficient z-score; std is floored at 1e-6."""
    if f.shape[1] != stats.mean.shape[0]:
        raise ShapeMismatch(
            f"Features have {f.shape[1]} coefficients, stats cover {stats.mean.shape[0]}"
        )
    std = np.maximum(stats.std, MIN_FEATURE_STD)
    return FeatureMatrix((f.values.astype(np.float64) - stats.mean) / std, f.fingerprint)
