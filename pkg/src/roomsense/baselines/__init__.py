"""Non-learned reference estimators."""

from roomsense.baselines.wada import (
    GAUSSIAN_G,
    WadaTable,
    amplitude_statistic,
    build_wada_table,
    load_or_build_table,
    wada_snr,
)

__all__ = [
    "GAUSSIAN_G",
    "WadaTable",
    "amplitude_statistic",
    "build_wada_table",
    "load_or_build_table",
    "wada_snr",
]
