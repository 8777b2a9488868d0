"""Tests for training on a dataset directory."""

import json

import numpy as np
import pytest

from roomsense.dataset.builder import LABELS_FILENAME, label_row, write_labels
from roomsense.errors import EmptySplit
from roomsense.features.mfcc import FeatureMatrix, MfccConfig
from roomsense.features.store import FEATURE_CONFIG_FILENAME, write_features
from roomsense.models.labels import AcousticLabel
from roomsense.models.manifest import Split
from roomsense.nn.fitting import fit_on_dataset, validation_split
from roomsense.nn.training import TrainConfig


@pytest.fixture
def dataset(tmp_path, rng):
    """Twelve train and two test examples of 16 x 16 features."""
    fp = MfccConfig().fingerprint()
    rows = []
    for i in range(14):
        split = Split.TRAIN if i < 12 else Split.TEST
        label = AcousticLabel(
            rt60=float(rng.uniform(0.2, 1.5)),
            drr=float(rng.uniform(-5, 10)),
            c50=float(rng.uniform(-5, 15)),
            c80=float(rng.uniform(0, 20)),
            sti=float(rng.uniform(0.3, 0.9)),
            snr=float(rng.integers(-5, 25)),
        )
        rows.append(label_row(i, split, label))
        write_features(FeatureMatrix(rng.standard_normal((16, 16)), fp), tmp_path / "features" / f"{i:06d}.rsft")
    write_labels(rows, tmp_path / LABELS_FILENAME)
    meta = {"config": MfccConfig().model_dump(), "fingerprint": fp.hex()}
    (tmp_path / "features" / FEATURE_CONFIG_FILENAME).write_text(json.dumps(meta))
    return tmp_path


class TestValidationSplit:
    """Tests for validation_split."""

    def test_disjoint_cover(self):
        """Test the two parts partition the indices."""
        fit, val = validation_split(20, 0.1, seed=1)

        assert len(val) == 2
        assert sorted(np.concatenate([fit, val]).tolist()) == list(range(20))

    def test_minimum_sizes(self):
        """Test each side keeps at least one example."""
        fit, val = validation_split(2, 0.9, seed=0)

        assert len(fit) == 1 and len(val) == 1

    def test_seeded(self):
        """Test the split depends on the seed."""
        assert validation_split(30, 0.2, 3)[1].tolist() == validation_split(30, 0.2, 3)[1].tolist()

    def test_too_few(self):
        """Test one example cannot be split."""
        with pytest.raises(EmptySplit):
            validation_split(1, 0.1, 0)


class TestFitOnDataset:
    """Tests for fit_on_dataset."""

    def test_trains_on_train_split(self, dataset):
        """Test only train examples are used and the store records how it was made."""
        store, result = fit_on_dataset(dataset, "crnn", config=TrainConfig(batch_size=4, max_epochs=2))

        assert store.extra["train_examples"] + store.extra["validation_examples"] == 12
        assert store.extra["mfcc_config"] == MfccConfig().model_dump()
        assert store.feature_fingerprint == MfccConfig().fingerprint()
        assert store.spec.input_shape == (16, 16, 1)
        assert store.target_stats.count == 12
        assert len(result.history) == 2

    def test_no_features(self, dataset, tmp_path):
        """Test a feature folder without train features raises EmptySplit."""
        with pytest.raises(EmptySplit):
            fit_on_dataset(dataset, feature_dir=tmp_path / "elsewhere")
