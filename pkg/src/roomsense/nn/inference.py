"""
Inference: MFCC matrix in, de-standardized AcousticLabel out.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from roomsense.errors import FingerprintMismatch
from roomsense.features.mfcc import FeatureMatrix, standardize
from roomsense.models.labels import TARGET_NAMES, AcousticLabel
from roomsense.nn.model import Model
from roomsense.nn.weights import WeightStore

logger = logging.getLogger(__name__)

_RT60 = TARGET_NAMES.index("rt60")
_STI = TARGET_NAMES.index("sti")


def destandardize(z: np.ndarray, store: WeightStore) -> np.ndarray:
    """Map network outputs back to physical units and clamp rt60 >= 0, sti into [0, 1]."""
    mean = np.array(store.target_stats.mean_vector())
    std = np.array(store.target_stats.std_vector())
    values = np.asarray(z, dtype=np.float64) * std + mean
    values[..., _RT60] = np.maximum(values[..., _RT60], 0.0)
    values[..., _STI] = np.clip(values[..., _STI], 0.0, 1.0)
    return values


class Estimator:
    """Holds a built model for repeated predictions from one WeightStore."""

    def __init__(self, store: WeightStore, model: Optional[Model] = None):
        self.store = store
        self.model = model or store.build()

    def _check(self, f: FeatureMatrix) -> None:
        if f.fingerprint != self.store.feature_fingerprint:
            raise FingerprintMismatch(
                f"Features {f.fingerprint.hex()} were not produced with the model's "
                f"configuration {self.store.feature_fingerprint.hex()}"
            )

    def predict_values(self, matrices: Sequence[FeatureMatrix], batch_size: int = 32) -> np.ndarray:
        """(n, 6) de-standardized predictions; matrices of differing length run one by one."""
        for f in matrices:
            self._check(f)
        inputs = [standardize(f, self.store.feature_stats).values for f in matrices]
        out = np.empty((len(inputs), len(TARGET_NAMES)))
        lengths = {x.shape[0] for x in inputs}
        if len(lengths) == 1:
            batch = np.stack(inputs)[..., None]
            for s in range(0, len(inputs), batch_size):
                out[s : s + batch_size] = self.model.forward(batch[s : s + batch_size])
        else:
            for i, x in enumerate(inputs):
                out[i] = self.model.forward(x[None, ..., None])[0]
        return destandardize(out, self.store)

    def predict(self, features: FeatureMatrix) -> AcousticLabel:
        return AcousticLabel.from_vector(self.predict_values([features])[0])


def predict(store: WeightStore, features: FeatureMatrix) -> AcousticLabel:
    """
    Estimate the six acoustic parameters of one feature matrix.

    Raises:
        FingerprintMismatch: If the features were computed under another MFCC config
    """
    return Estimator(store).predict(features)


def predict_many(store: WeightStore, matrices: List[FeatureMatrix]) -> np.ndarray:
    return Estimator(store).predict_values(matrices)
