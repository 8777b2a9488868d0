"""MFCC features and their on-disk format."""

from roomsense.features.mfcc import (
    FeatureMatrix,
    FeatureStats,
    MfccConfig,
    compute_feature_stats,
    compute_mfcc,
    log_mel,
    power_spectrum,
    standardize,
)
from roomsense.features.store import (
    featurize_directory,
    load_config,
    load_feature_set,
    read_features,
    write_features,
)

__all__ = [
    "FeatureMatrix",
    "FeatureStats",
    "MfccConfig",
    "compute_feature_stats",
    "compute_mfcc",
    "featurize_directory",
    "load_config",
    "load_feature_set",
    "log_mel",
    "power_spectrum",
    "read_features",
    "standardize",
    "write_features",
]
