"""
Train a model on a built, featurized dataset and package the result as a WeightStore.
"""

import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from roomsense.dataset.builder import (
    LABELS_FILENAME,
    MANIFEST_FILENAME,
    compute_label_stats,
    labels_from_frame,
    read_labels,
)
from roomsense.errors import EmptySplit, FingerprintMismatch, ShapeMismatch
from roomsense.features.mfcc import FeatureMatrix, FeatureStats, compute_feature_stats, standardize
from roomsense.features.store import FEATURE_CONFIG_FILENAME, load_feature_set
from roomsense.models.labels import AcousticLabel
from roomsense.models.manifest import DatasetManifest, LabelStats, Split
from roomsense.nn.model import Model, build_model
from roomsense.nn.training import TrainConfig, TrainResult, train
from roomsense.nn.weights import WeightStore

logger = logging.getLogger(__name__)


def stack_inputs(matrices: List[FeatureMatrix], stats: FeatureStats) -> np.ndarray:
    """Standardized (n, T, F, 1) float32 network input."""
    frames = {m.shape[0] for m in matrices}
    if len(frames) != 1:
        raise ShapeMismatch(f"Training matrices have differing frame counts {sorted(frames)}")
    return np.stack([standardize(m, stats).values for m in matrices])[..., None].astype(np.float32)


def standardize_targets(labels: List[AcousticLabel], stats: LabelStats) -> np.ndarray:
    mean = np.array(stats.mean_vector())
    std = np.array(stats.std_vector())
    return np.vstack([(label.to_vector() - mean) / std for label in labels]).astype(np.float32)


def validation_split(n: int, fraction: float, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """Seeded (train, validation) index split with at least one example on each side."""
    if n < 2:
        raise EmptySplit(f"Need at least two training examples to hold out validation, got {n}")
    order = np.random.default_rng(seed).permutation(n)
    n_val = min(n - 1, max(1, int(round(fraction * n))))
    return np.sort(order[n_val:]), np.sort(order[:n_val])


def _train_label_stats(dataset_dir: Path, labels: List[AcousticLabel]) -> LabelStats:
    manifest_path = dataset_dir / MANIFEST_FILENAME
    if manifest_path.exists():
        manifest = DatasetManifest.load(manifest_path)
        if manifest.label_stats is not None:
            return manifest.label_stats
    logger.info("Dataset manifest has no label statistics; computing them from train labels")
    return compute_label_stats(labels)


def _feature_config(feature_dir: Path) -> Optional[dict]:
    path = feature_dir / FEATURE_CONFIG_FILENAME
    if not path.exists():
        return None
    return json.loads(path.read_text(encoding="utf-8"))["config"]


def fit_on_dataset(
    dataset_dir: Union[str, Path],
    model_name: str = "crnn",
    feature_dir: Optional[Union[str, Path]] = None,
    config: Optional[TrainConfig] = None,
) -> Tuple[WeightStore, TrainResult]:
    """
    Train `model_name` on the train split of a dataset.

    A seeded `validation_fraction` of the train split is held out for early stopping.
    Feature statistics come from the fitting part only; target statistics are the
    dataset's train-split label statistics.

    Raises:
        EmptySplit: If the train split has fewer than two featurized examples
        FingerprintMismatch: If the features were made under differing MFCC configs
    """
    config = config or TrainConfig()
    dataset_dir = Path(dataset_dir)
    feature_dir = Path(feature_dir) if feature_dir else dataset_dir / "features"

    triples = [t for t in labels_from_frame(read_labels(dataset_dir / LABELS_FILENAME)) if t[1] == Split.TRAIN]
    by_id = {example_id: label for example_id, _, label in triples}
    ids, matrices = load_feature_set(feature_dir, sorted(by_id))
    if not ids:
        raise EmptySplit(f"No featurized train examples under {feature_dir}")
    fingerprints = {m.fingerprint for m in matrices}
    if len(fingerprints) != 1:
        raise FingerprintMismatch(f"Train features come from {len(fingerprints)} different MFCC configs")
    fingerprint = fingerprints.pop()

    labels = [by_id[i] for i in ids]
    fit_idx, val_idx = validation_split(len(ids), config.validation_fraction, config.seed)
    feature_stats = compute_feature_stats([matrices[i] for i in fit_idx])
    target_stats = _train_label_stats(dataset_dir, labels)

    x = stack_inputs(matrices, feature_stats)
    y = standardize_targets(labels, target_stats)
    logger.info(f"Training {model_name} on {len(fit_idx)} examples, validating on {len(val_idx)}")

    spec = build_model(model_name, input_shape=x.shape[1:], dropout=config.dropout)
    model = Model(spec, seed=config.seed)
    result = train(model, x[fit_idx], y[fit_idx], x[val_idx], y[val_idx], config)

    store = WeightStore.from_model(
        model,
        target_stats,
        feature_stats,
        fingerprint,
        extra={
            "best_epoch": result.best_epoch,
            "best_val_loss": result.best_val_loss,
            "train_examples": int(len(fit_idx)),
            "validation_examples": int(len(val_idx)),
            "config": config.model_dump(),
            "mfcc_config": _feature_config(feature_dir),
        },
    )
    return store, result
