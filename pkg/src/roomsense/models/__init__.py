"""
Data models and schemas for labels, manifests and reports.
"""

from roomsense.models.labels import TARGET_NAMES, TARGET_UNITS, AcousticLabel, LabelFlag
from roomsense.models.manifest import (
    DatasetManifest,
    ExampleRecipe,
    LabelStats,
    NoiseKind,
    NoiseSpec,
    SpeechRef,
    Split,
    SplitConfig,
)
from roomsense.models.report import EvalReport, ExamplePair, SnrBinRow

__all__ = [
    "TARGET_NAMES",
    "TARGET_UNITS",
    "AcousticLabel",
    "DatasetManifest",
    "EvalReport",
    "ExamplePair",
    "ExampleRecipe",
    "LabelFlag",
    "LabelStats",
    "NoiseKind",
    "NoiseSpec",
    "SnrBinRow",
    "SpeechRef",
    "Split",
    "SplitConfig",
]
