"""
Dataset manifest schema.

A DatasetManifest is the complete, versioned recipe for a synthesized dataset: which
speech chunk, RIR and noise go into every example, at which SNR, in which split, and
with which ground-truth label. Everything needed to rebuild an example is in its
recipe plus the manifest's master seed.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field, model_validator

from roomsense.errors import UnsupportedSchema
from roomsense.models.labels import TARGET_NAMES, AcousticLabel

MANIFEST_SCHEMA_VERSION = 2


class Split(str, Enum):
    """Dataset partitions."""

    TRAIN = "train"
    TEST = "test"


class NoiseKind(str, Enum):
    """Noise sources that can be mixed into an example."""

    WHITE = "white"
    PINK = "pink"
    REAL = "real"
    NONE = "none"


class NoiseSpec(BaseModel):
    """What noise to add, and where it comes from."""

    kind: NoiseKind
    source: Optional[str] = Field(None, description="Recording path (real noise only)")
    seed: Optional[int] = Field(
        None, ge=0, lt=2**64, description="Generator seed / real-noise offset seed"
    )

    @model_validator(mode="after")
    def check_source_and_seed(self) -> "NoiseSpec":
        if self.kind == NoiseKind.REAL and not self.source:
            raise ValueError("real noise requires a source path")
        if self.kind in (NoiseKind.WHITE, NoiseKind.PINK) and self.seed is None:
            raise ValueError(f"{self.kind.value} noise requires a seed")
        return self


class SpeechRef(BaseModel):
    """One fixed-length chunk of a speech file."""

    path: str
    chunk_index: int = Field(0, ge=0)


class ExampleRecipe(BaseModel):
    """Everything needed to synthesize one dataset example."""

    id: int = Field(..., ge=0)
    speech: SpeechRef
    rir: Optional[str] = Field(None, description="RIR path, None for a reverb-free example")
    noise: NoiseSpec
    target_snr: Optional[int] = Field(
        None, ge=-5, le=24, description="Integer SNR in dB when noise is present"
    )
    split: Split
    label: Optional[AcousticLabel] = None

    @model_validator(mode="after")
    def check_snr(self) -> "ExampleRecipe":
        has_noise = self.noise.kind != NoiseKind.NONE
        if has_noise and self.target_snr is None:
            raise ValueError("noisy recipes need a target_snr")
        if not has_noise and self.target_snr is not None:
            raise ValueError("noise-free recipes must not carry a target_snr")
        return self

    @property
    def example_name(self) -> str:
        return f"{self.id:06d}"


class SplitConfig(BaseModel):
    """How sources were partitioned."""

    speech_train_fraction: float = 0.8
    rir_train_fraction: float = 306 / 406
    noise_train_fraction: float = 0.8
    speech_train: List[str] = Field(default_factory=list)
    speech_test: List[str] = Field(default_factory=list)
    rir_train: List[str] = Field(default_factory=list)
    rir_test: List[str] = Field(default_factory=list)
    noise_train: List[str] = Field(default_factory=list)
    noise_test: List[str] = Field(default_factory=list)


class LabelStats(BaseModel):
    """Per-target mean/std over the train split, used to standardize network targets."""

    mean: Dict[str, float]
    std: Dict[str, float]
    count: int = 0

    def mean_vector(self) -> List[float]:
        return [self.mean[name] for name in TARGET_NAMES]

    def std_vector(self) -> List[float]:
        return [self.std[name] for name in TARGET_NAMES]


class DatasetManifest(BaseModel):
    """Reproducible description of a labeled dataset."""

    schema_version: int = MANIFEST_SCHEMA_VERSION
    master_seed: int = Field(..., ge=0)
    sample_rate: int = 16000
    chunk_samples: int = 128000
    ratio_cap_db: float = 60.0
    clean_snr_cap_db: float = 30.0
    onset_threshold: float = Field(0.05, gt=0, le=1)
    db_floor: float = Field(-120.0, lt=0)
    analyzer_version: str = ""
    package_version: str = ""
    split_config: SplitConfig = Field(default_factory=SplitConfig)
    entries: List[ExampleRecipe] = Field(default_factory=list)
    label_stats: Optional[LabelStats] = None

    @model_validator(mode="after")
    def check_no_leakage(self) -> "DatasetManifest":
        cfg = self.split_config
        for name, train, test in (
            ("speech", cfg.speech_train, cfg.speech_test),
            ("rir", cfg.rir_train, cfg.rir_test),
            ("noise", cfg.noise_train, cfg.noise_test),
        ):
            overlap = set(train) & set(test)
            if overlap:
                raise ValueError(f"{name} files appear in both splits: {sorted(overlap)[:3]}")
        return self

    def entries_for(self, split: Split) -> List[ExampleRecipe]:
        return [entry for entry in self.entries if entry.split == split]

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "DatasetManifest":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        version = data.get("schema_version", 0)
        if version != MANIFEST_SCHEMA_VERSION:
            raise UnsupportedSchema(
                f"Manifest schema {version} is not supported (expected {MANIFEST_SCHEMA_VERSION})"
            )
        return cls.model_validate(data)
