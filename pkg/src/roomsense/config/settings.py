"""
Configuration management for the acoustic estimation pipeline.

This module uses pydantic-settings to manage configuration from environment
variables with validation and type safety.
"""

from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Application settings loaded from environment variables.

    Create a .env file in the project root with any of the following variables:

    # Reproducibility / parallelism
    MASTER_SEED=0
    JOBS=4

    # Signal chain
    SAMPLE_RATE=16000
    CHUNK_SECONDS=8.0

    # Label conventions
    RATIO_CAP_DB=60
    CLEAN_SNR_CAP_DB=30

    # Logging
    LOG_LEVEL=INFO
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Reproducibility / parallelism
    master_seed: int = Field(default=0, description="Seed every derived RNG stream starts from", ge=0)
    jobs: int = Field(default=1, description="Worker processes for batch synthesis", ge=1, le=256)

    # Signal chain
    sample_rate: int = Field(default=16000, description="Working sample rate in Hz", gt=0)
    chunk_seconds: float = Field(default=8.0, description="Length of every dataset chunk", gt=0)

    # RIR analysis
    onset_threshold: float = Field(
        default=0.05,
        description="Fraction of the absolute peak that marks the RIR onset",
        gt=0,
        le=1,
    )
    db_floor: float = Field(default=-120.0, description="Floor of the Schroeder decay curve in dB", lt=0)
    ratio_cap_db: float = Field(
        default=60.0, description="Energy-ratio label used when late energy vanishes", gt=0
    )

    # Mixing
    clean_snr_cap_db: float = Field(
        default=30.0, description="SNR label attached to noise-free examples", gt=0
    )
    snr_min_db: int = Field(default=-5, description="Lowest target SNR drawn for a recipe", ge=-5)
    snr_max_db: int = Field(default=24, description="Highest target SNR drawn for a recipe", le=24)

    # Splits and dataset composition
    speech_train_fraction: float = Field(default=0.8, gt=0, lt=1)
    rir_train_fraction: float = Field(default=306 / 406, gt=0, lt=1)
    noise_train_fraction: float = Field(default=0.8, gt=0, lt=1)
    reverb_free_fraction: float = Field(default=0.1, ge=0, le=1)
    noise_free_fraction: float = Field(default=0.1, ge=0, le=1)
    validation_fraction: float = Field(
        default=0.1, description="Share of the train split held out for early stopping", gt=0, lt=1
    )

    # Output Configuration
    wada_table_path: Optional[str] = Field(
        None, description="Cached WADA lookup table (.npz); built on demand when missing"
    )

    # Logging Configuration
    log_level: str = Field(default="INFO", description="Logging level")

    @field_validator("snr_max_db")
    @classmethod
    def validate_snr_range(cls, v: int, info) -> int:
        """Ensure the SNR range is not empty."""
        low = info.data.get("snr_min_db")
        if low is not None and v < low:
            raise ValueError("snr_max_db must be >= snr_min_db")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Ensure log level is valid."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v_upper = v.upper()
        if v_upper not in valid_levels:
            raise ValueError(f"log_level must be one of {valid_levels}")
        return v_upper

    @property
    def chunk_samples(self) -> int:
        """Number of samples in one dataset chunk at the working rate."""
        return int(round(self.chunk_seconds * self.sample_rate))


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """
    Get or create the global settings instance.

    Returns:
        Settings: The application settings
    """
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings
