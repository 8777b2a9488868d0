"""
Evaluation report schema.

An EvalReport is the JSON artifact of `roomsense evaluate`: overall and per-SNR-bin
errors, exclusion counts and the per-example pairs the calibration export is made from.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator

REPORT_SCHEMA_VERSION = 1


class ExamplePair(BaseModel):
    """Truth and prediction for one test example."""

    id: int = Field(..., ge=0)
    true: Dict[str, float] = Field(..., description="Label values by target name")
    pred: Dict[str, float] = Field(..., description="Predicted values by target name")
    flags: List[str] = Field(default_factory=list, description="Label flags, as strings")


class SnrBinRow(BaseModel):
    """Errors of the room parameters for examples whose true SNR lies in (bin_lo, bin_hi]."""

    bin_lo: float
    bin_hi: float
    n: int = Field(..., ge=0)
    empty: bool = False
    mae: Dict[str, Optional[float]] = Field(default_factory=dict)


class EvalReport(BaseModel):
    """
    Evaluation of one model on one dataset split.

    `mae` leaves out labels that are conventions (capped ratios, invalid RT60, capped SNR);
    `mae_all` keeps every example. `excluded` counts the examples dropped per parameter.
    """

    schema_version: int = REPORT_SCHEMA_VERSION
    model_name: str
    model_fingerprint: str = Field(..., description="Hex fingerprint of the model spec")
    feature_fingerprint: str = Field(..., description="Hex fingerprint of the MFCC config")
    dataset_fingerprint: str = Field(..., description="Hex digest of the evaluated labels")
    split: str = "test"
    n_examples: int = Field(..., ge=0)
    mae: Dict[str, Optional[float]]
    mae_all: Dict[str, Optional[float]]
    excluded: Dict[str, int]
    mean_predictor_mae: Dict[str, Optional[float]] = Field(
        default_factory=dict, description="Errors of always predicting the train mean"
    )
    wada_snr_mae: Optional[float] = Field(None, description="WADA-SNR baseline error in dB")
    bins: List[SnrBinRow] = Field(default_factory=list)
    pairs: List[ExamplePair] = Field(default_factory=list)

    @field_validator("mae", "mae_all", "mean_predictor_mae")
    @classmethod
    def check_non_negative(cls, v: Dict[str, Optional[float]]) -> Dict[str, Optional[float]]:
        """Errors are absolute values."""
        for name, value in v.items():
            if value is not None and value < 0:
                raise ValueError(f"MAE for {name} is negative")
        return v

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)
