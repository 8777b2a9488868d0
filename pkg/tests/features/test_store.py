"""Tests for RSFT files and directory featurization."""

import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from roomsense.dsp.signal import Signal, write_wav
from roomsense.errors import CorruptHeader, UnsupportedFormat
from roomsense.features.mfcc import FeatureMatrix, MfccConfig
from roomsense.features.store import (
    FEATURE_CONFIG_FILENAME,
    _HEADER,
    featurize_directory,
    load_config,
    load_feature_set,
    read_features,
    write_features,
)


@pytest.fixture
def matrix(rng):
    return FeatureMatrix(rng.standard_normal((5, 3)), MfccConfig().fingerprint())


class TestRsftFiles:
    """Tests for write_features and read_features."""

    def test_write_then_read(self, matrix, tmp_path):
        """Test values and fingerprint come back unchanged."""
        back = read_features(write_features(matrix, tmp_path / "x.rsft"))

        assert_array_equal(back.values, matrix.values)
        assert back.fingerprint == matrix.fingerprint

    def test_header_layout(self, matrix, tmp_path):
        """Test the file is a fixed header followed by float32 payload."""
        path = write_features(matrix, tmp_path / "x.rsft")

        assert path.stat().st_size == _HEADER.size + 5 * 3 * 4
        assert path.read_bytes()[:4] == b"RSFT"

    def test_bad_magic(self, matrix, tmp_path):
        """Test a foreign file is refused."""
        path = write_features(matrix, tmp_path / "x.rsft")
        path.write_bytes(b"WAVE" + path.read_bytes()[4:])

        with pytest.raises(UnsupportedFormat):
            read_features(path)

    def test_bad_version(self, matrix, tmp_path):
        """Test an unknown version is refused."""
        path = write_features(matrix, tmp_path / "x.rsft")
        raw = bytearray(path.read_bytes())
        raw[4] = 9
        path.write_bytes(bytes(raw))

        with pytest.raises(UnsupportedFormat):
            read_features(path)

    def test_truncated(self, matrix, tmp_path):
        """Test a short payload or header raises CorruptHeader."""
        path = write_features(matrix, tmp_path / "x.rsft")
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(CorruptHeader):
            read_features(path)

        path.write_bytes(b"RSFT")
        with pytest.raises(CorruptHeader):
            read_features(path)

    def test_missing(self, tmp_path):
        """Test a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            read_features(tmp_path / "nope.rsft")


class TestFeaturizeDirectory:
    """Tests for featurize_directory and load_feature_set."""

    def test_dataset_layout(self, tmp_path, rng):
        """Test WAVs under wav/ become RSFT files and short files are counted as failed."""
        wav_dir = tmp_path / "data" / "wav"
        write_wav(Signal(0.1 * rng.standard_normal(16000), 16000), wav_dir / "000000.wav")
        write_wav(Signal(0.1 * rng.standard_normal(48000), 48000), wav_dir / "000001.wav")
        write_wav(Signal(np.zeros(100), 16000), wav_dir / "000002.wav")

        counts = featurize_directory(tmp_path / "data", tmp_path / "feat")

        assert counts == {"written": 2, "failed": 1}
        assert read_features(tmp_path / "feat" / "000001.rsft").shape == (98, 32)
        meta = json.loads((tmp_path / "feat" / FEATURE_CONFIG_FILENAME).read_text())
        assert meta["fingerprint"] == MfccConfig().fingerprint().hex()

        ids, matrices = load_feature_set(tmp_path / "feat", [0, 1, 2])
        assert ids == [0, 1]
        assert len(matrices) == 2

    def test_empty_directory(self, tmp_path):
        """Test a folder without WAVs raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            featurize_directory(tmp_path, tmp_path / "feat")


class TestLoadConfig:
    """Tests for load_config."""

    def test_defaults(self):
        """Test no path gives the default config."""
        assert load_config(None) == MfccConfig()

    def test_from_json(self, tmp_path):
        """Test a JSON file overrides fields."""
        path = tmp_path / "mfcc.json"
        path.write_text(json.dumps({"num_coeffs": 13}))

        assert load_config(path).num_coeffs == 13
