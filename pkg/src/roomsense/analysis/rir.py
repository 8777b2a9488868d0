"""
Ground-truth label extraction: one AcousticLabel per room impulse response.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from roomsense.analysis.decay import (
    DEFAULT_DB_FLOOR,
    DEFAULT_ONSET_THRESHOLD,
    align_onset,
    energy_ratio,
    estimate_rt60,
    schroeder_decay,
)
from roomsense.analysis.sti import sti_analysis
from roomsense.config.settings import Settings, get_settings
from roomsense.dsp.signal import Signal, load_wav, resample
from roomsense.errors import DegenerateFit, InsufficientDecayRange, ZeroLateEnergy
from roomsense.models.labels import AcousticLabel, LabelFlag

logger = logging.getLogger(__name__)

# Bumped whenever a change to the analysis would alter label values.
ANALYZER_VERSION = "1.0.0"

ANALYSIS_RATE = 16000
DEFAULT_RATIO_CAP_DB = 60.0

# Early/late split points in milliseconds and the flag raised when each is capped.
RATIO_SPLITS = {
    "drr": (2.5, LabelFlag.DRR_CAPPED),
    "c50": (50.0, LabelFlag.C50_CAPPED),
    "c80": (80.0, LabelFlag.C80_CAPPED),
}


def analyze_rir(
    h: Signal,
    ratio_cap_db: float = DEFAULT_RATIO_CAP_DB,
    onset_threshold: float = DEFAULT_ONSET_THRESHOLD,
    db_floor: float = DEFAULT_DB_FLOOR,
    sti_weighting: str = "male",
) -> AcousticLabel:
    """
    Compute RT60, DRR, C50, C80 and STI of an impulse response.

    The RIR is resampled to 16 kHz and onset-aligned once; every parameter is then
    measured on the same aligned response. Per-parameter failures are recorded as
    flags on the label instead of aborting.

    Args:
        h: Room impulse response at any sample rate
        ratio_cap_db: Value used for an energy ratio whose late window is empty
        onset_threshold: Fraction of the absolute peak that marks the onset
        db_floor: Floor of the Schroeder decay curve in dB
        sti_weighting: Band weighting passed to the STI computation

    Returns:
        AcousticLabel without an SNR

    Raises:
        AllZeroRir: If the RIR carries no energy
    """
    if h.sample_rate != ANALYSIS_RATE:
        h = resample(h, ANALYSIS_RATE)
    aligned = align_onset(h, onset_threshold)
    flags = []

    try:
        rt60 = estimate_rt60(schroeder_decay(aligned, db_floor))
    except (InsufficientDecayRange, DegenerateFit) as e:
        logger.debug(f"RT60 marked invalid: {e}")
        rt60 = 0.0
        flags.append(LabelFlag.RT60_INVALID)

    total = float((aligned.as_float64() ** 2).sum())
    ratios: Dict[str, float] = {}
    for name, (split_ms, cap_flag) in RATIO_SPLITS.items():
        try:
            value = energy_ratio(aligned, split_ms, total)
        except ZeroLateEnergy:
            value = ratio_cap_db
            flags.append(cap_flag)
        if value > ratio_cap_db:
            value = ratio_cap_db
            flags.append(cap_flag)
        ratios[name] = value

    sti = sti_analysis(aligned, sti_weighting)
    if sti.band_silent:
        flags.append(LabelFlag.STI_BAND_SILENT)

    return AcousticLabel(rt60=rt60, sti=sti.sti, flags=flags, **ratios)


def analyze_file(
    path: Union[str, Path],
    ratio_cap_db: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> Dict[str, Any]:
    """
    Analyze one RIR file into a flat record for CLI output.

    The ratio cap, onset threshold and decay floor come from the settings unless
    `ratio_cap_db` overrides the cap.

    Returns:
        Dictionary with the file path, the five RIR parameters, flags and analyzer version
    """
    settings = settings or get_settings()
    label = analyze_rir(
        load_wav(path),
        ratio_cap_db=ratio_cap_db if ratio_cap_db is not None else settings.ratio_cap_db,
        onset_threshold=settings.onset_threshold,
        db_floor=settings.db_floor,
    )
    return {
        "file": str(path),
        "rt60_s": label.rt60,
        "drr_db": label.drr,
        "c50_db": label.c50,
        "c80_db": label.c80,
        "sti": label.sti,
        "flags": label.flag_string(),
        "analyzer_version": ANALYZER_VERSION,
    }
