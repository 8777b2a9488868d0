"""Room impulse response analysis."""

from roomsense.analysis.decay import (
    DecayCurve,
    align_onset,
    energy_ratio,
    estimate_rt60,
    schroeder_decay,
)
from roomsense.analysis.rir import ANALYZER_VERSION, analyze_file, analyze_rir
from roomsense.analysis.sti import StiAnalysis, compute_sti, sti_analysis, sti_from_mtf

__all__ = [
    "ANALYZER_VERSION",
    "DecayCurve",
    "StiAnalysis",
    "align_onset",
    "analyze_file",
    "analyze_rir",
    "compute_sti",
    "energy_ratio",
    "estimate_rt60",
    "schroeder_decay",
    "sti_analysis",
    "sti_from_mtf",
]
