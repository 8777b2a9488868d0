"""
WADA-SNR: blind SNR estimation from the waveform amplitude distribution.

Clean speech amplitudes are modelled as Gamma(0.4) and noise as Gaussian. The statistic

    G = ln(mean |z|) - mean(ln |z|)

rises monotonically from the Gaussian value (about 0.409) to the Gamma value as the SNR
grows, so a lookup table G -> SNR built by simulation inverts it.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from roomsense.dsp.signal import Signal
from roomsense.errors import NonMonotoneTable, SilentSignal

logger = logging.getLogger(__name__)

GAMMA_SHAPE = 0.4
SNR_MIN_DB = -20.0
SNR_MAX_DB = 100.0
SNR_STEP_DB = 0.5
DEFAULT_SAMPLES_PER_POINT = 1_000_000
AMPLITUDE_FLOOR = 1e-10

# ln sqrt(2/pi) + (euler_gamma + ln 2) / 2, the G of pure Gaussian noise.
GAUSSIAN_G = float(0.5 * np.log(2.0 / np.pi) + (np.euler_gamma + np.log(2.0)) / 2.0)


def amplitude_statistic(z: np.ndarray) -> float:
    """
    G over all samples with |z| > 1e-10.

    Raises:
        SilentSignal: If no sample clears the floor
    """
    a = np.abs(np.asarray(z, dtype=np.float64))
    a = a[a > AMPLITUDE_FLOOR]
    if a.size == 0:
        raise SilentSignal("No sample exceeds the amplitude floor")
    return float(np.log(a.mean()) - np.log(a).mean())


@dataclass(frozen=True)
class WadaTable:
    """Monotone G -> SNR lookup sampled on a regular SNR grid."""

    snr_db: np.ndarray
    g: np.ndarray
    seed: int = 0
    samples_per_point: int = DEFAULT_SAMPLES_PER_POINT

    def __post_init__(self):
        snr = np.asarray(self.snr_db, dtype=np.float64)
        g = np.asarray(self.g, dtype=np.float64)
        if snr.shape != g.shape or snr.ndim != 1 or snr.size < 2:
            raise ValueError("snr_db and g must be equal-length 1-D arrays")
        object.__setattr__(self, "snr_db", snr)
        object.__setattr__(self, "g", g)
        self.check_monotone()

    def check_monotone(self) -> None:
        steps = np.diff(self.g)
        if not np.all(steps > 0):
            worst = int(np.argmin(steps))
            raise NonMonotoneTable(
                f"G does not increase between {self.snr_db[worst]} and {self.snr_db[worst + 1]} dB; "
                f"use more samples per point"
            )

    def lookup(self, g: float) -> float:
        """Linear interpolation of SNR at statistic g, clamped to the grid range."""
        return float(np.interp(g, self.g, self.snr_db))

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as fh:
            np.savez(
                fh,
                snr_db=self.snr_db,
                g=self.g,
                seed=np.int64(self.seed),
                samples_per_point=np.int64(self.samples_per_point),
            )
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "WadaTable":
        with np.load(Path(path)) as data:
            return cls(
                snr_db=data["snr_db"],
                g=data["g"],
                seed=int(data["seed"]),
                samples_per_point=int(data["samples_per_point"]),
            )


def build_wada_table(
    seed: int = 0,
    samples_per_point: int = DEFAULT_SAMPLES_PER_POINT,
    shape: float = GAMMA_SHAPE,
) -> WadaTable:
    """
    Simulate G on the SNR grid [-20, 100] dB in 0.5 dB steps.

    One Gamma speech draw and one Gaussian noise draw are shared by every grid point,
    so neighbouring points differ only through the mixing gain. The curve is smoothed
    with a 3-point moving average (end points kept) before the monotonicity check.

    Raises:
        NonMonotoneTable: If the smoothed curve is not strictly increasing
    """
    if samples_per_point < DEFAULT_SAMPLES_PER_POINT:
        logger.warning(
            f"{samples_per_point} samples per point is below {DEFAULT_SAMPLES_PER_POINT}; "
            f"the table may be noisy"
        )
    rng = np.random.default_rng(seed)
    speech = rng.gamma(shape, 1.0, samples_per_point) * rng.choice(
        np.array([-1.0, 1.0]), size=samples_per_point
    )
    noise = rng.standard_normal(samples_per_point)
    p_speech = float(np.mean(speech**2))
    p_noise = float(np.mean(noise**2))

    grid = np.arange(SNR_MIN_DB, SNR_MAX_DB + SNR_STEP_DB / 2, SNR_STEP_DB)
    g = np.empty_like(grid)
    for i, snr in enumerate(grid):
        gain = np.sqrt(p_speech / (p_noise * 10.0 ** (snr / 10.0)))
        g[i] = amplitude_statistic(speech + gain * noise)

    smoothed = g.copy()
    smoothed[1:-1] = (g[:-2] + g[1:-1] + g[2:]) / 3.0
    logger.info(f"Built WADA table: G from {smoothed[0]:.4f} to {smoothed[-1]:.4f}")
    return WadaTable(grid, smoothed, seed, samples_per_point)


def load_or_build_table(
    path: Optional[Union[str, Path]], seed: int = 0, samples_per_point: int = DEFAULT_SAMPLES_PER_POINT
) -> WadaTable:
    """Use the cached table at `path` when its seed stamp matches, otherwise build and cache it."""
    if path is not None and Path(path).exists():
        table = WadaTable.load(path)
        if table.seed == seed and table.samples_per_point == samples_per_point:
            return table
        logger.info(f"Cached table {path} has a different stamp; rebuilding")
    table = build_wada_table(seed, samples_per_point)
    if path is not None:
        table.save(path)
    return table


def wada_snr(s: Signal, table: WadaTable) -> float:
    """
    Blind SNR estimate of a speech signal in dB.

    Raises:
        SilentSignal: If the signal has no sample above the amplitude floor
    """
    return table.lookup(amplitude_statistic(s.samples))
