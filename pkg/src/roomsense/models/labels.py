"""
Acoustic label schema.

An AcousticLabel is both the ground truth extracted from an RIR (plus the mixing SNR)
and the shape of a network prediction. Flags record every place where a value is a
convention (cap, invalid fit) rather than a measurement.
"""

from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

# Column order of every target vector, label CSV and network output head.
TARGET_NAMES: Tuple[str, ...] = ("rt60", "drr", "c50", "c80", "sti", "snr")

TARGET_UNITS = {
    "rt60": "s",
    "drr": "dB",
    "c50": "dB",
    "c80": "dB",
    "sti": "",
    "snr": "dB",
}


class LabelFlag(str, Enum):
    """Reasons a label field is not a plain measurement."""

    RT60_INVALID = "rt60_invalid"
    DRR_CAPPED = "drr_capped"
    C50_CAPPED = "c50_capped"
    C80_CAPPED = "c80_capped"
    STI_BAND_SILENT = "sti_band_silent"
    SNR_CAPPED = "snr_capped"
    REVERB_FREE = "reverb_free"
    SILENT_INPUT = "silent_input"


# Flags that disqualify a given target from error metrics.
EXCLUDING_FLAGS = {
    "rt60": {LabelFlag.RT60_INVALID},
    "drr": {LabelFlag.DRR_CAPPED},
    "c50": {LabelFlag.C50_CAPPED},
    "c80": {LabelFlag.C80_CAPPED},
    "sti": set(),
    "snr": {LabelFlag.SNR_CAPPED},
}


def _normalize_flags(flags) -> List[LabelFlag]:
    return sorted({LabelFlag(f) for f in flags}, key=lambda f: f.value)


class AcousticLabel(BaseModel):
    """
    Six-parameter description of an acoustic condition.

    Example:
        >>> label = AcousticLabel(rt60=0.5, drr=3.1, c50=4.2, c80=7.0, sti=0.62, snr=10)
        >>> label.to_vector()
        array([ 0.5 ,  3.1 ,  4.2 ,  7.  ,  0.62, 10.  ])
    """

    rt60: float = Field(..., ge=0, description="Reverberation time in seconds")
    drr: float = Field(..., description="Direct-to-reverberant ratio (2.5 ms split) in dB")
    c50: float = Field(..., description="Clarity with a 50 ms split in dB")
    c80: float = Field(..., description="Clarity with an 80 ms split in dB")
    sti: float = Field(..., ge=0, le=1, description="Speech transmission index")
    snr: Optional[float] = Field(None, description="Mixing SNR in dB, absent for a bare RIR")
    flags: List[LabelFlag] = Field(default_factory=list)

    model_config = {"use_enum_values": False}

    @field_validator("flags")
    @classmethod
    def dedupe_flags(cls, v: List[LabelFlag]) -> List[LabelFlag]:
        """Keep flags unique and in a stable order."""
        return _normalize_flags(v)

    def has_flag(self, flag: LabelFlag) -> bool:
        return flag in self.flags

    def is_excluded(self, target: str) -> bool:
        """True when `target` is a convention value and must not enter metrics."""
        return any(flag in self.flags for flag in EXCLUDING_FLAGS[target])

    def with_snr(self, snr: float, capped: bool = False) -> "AcousticLabel":
        flags = list(self.flags)
        if capped:
            flags.append(LabelFlag.SNR_CAPPED)
        return self.model_copy(update={"snr": float(snr), "flags": _normalize_flags(flags)})

    def to_vector(self) -> np.ndarray:
        """Return the label as a float64 vector in TARGET_NAMES order."""
        if self.snr is None:
            raise ValueError("Label has no SNR; attach one with with_snr() first")
        return np.array([getattr(self, name) for name in TARGET_NAMES], dtype=np.float64)

    @classmethod
    def from_vector(
        cls, values: Sequence[float], flags: Optional[List[LabelFlag]] = None
    ) -> "AcousticLabel":
        data = {name: float(v) for name, v in zip(TARGET_NAMES, values)}
        return cls(**data, flags=flags or [])

    def flag_string(self) -> str:
        return "|".join(flag.value for flag in self.flags)

    @staticmethod
    def parse_flags(text: Optional[str]) -> List[LabelFlag]:
        if not isinstance(text, str) or not text:
            return []
        return [LabelFlag(part) for part in text.split("|") if part]
