"""Tests for error metrics."""

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from roomsense.errors import EmptyInput, LengthMismatch
from roomsense.evaluation.metrics import (
    CALIBRATION_COLUMNS,
    binned_mae,
    calibration_table,
    mae,
    snr_bin_index,
)
from roomsense.models.labels import TARGET_NAMES

SNR = TARGET_NAMES.index("snr")
STI = TARGET_NAMES.index("sti")


class TestMae:
    """Tests for mae."""

    def test_hand_computed(self):
        """Test |0 - 1| and |2 - 1| average to 1."""
        assert mae([0.0, 2.0], [1.0, 1.0], names=("x",)) == {"x": 1.0}

    def test_per_column(self):
        """Test each parameter is averaged separately."""
        preds = np.zeros((2, 6))
        trues = np.tile(np.arange(6.0), (2, 1))

        assert mae(preds, trues) == dict(zip(TARGET_NAMES, np.arange(6.0).tolist()))

    def test_valid_mask(self):
        """Test masked cells are left out and fully masked columns give None."""
        preds = np.array([[0.0, 0.0], [10.0, 0.0]])
        trues = np.zeros((2, 2))
        valid = np.array([[True, False], [False, False]])

        assert mae(preds, trues, valid, names=("a", "b")) == {"a": 0.0, "b": None}

    def test_length_mismatch(self):
        """Test misaligned inputs raise LengthMismatch."""
        with pytest.raises(LengthMismatch):
            mae(np.zeros((3, 6)), np.zeros((2, 6)))
        with pytest.raises(LengthMismatch):
            mae(np.zeros((2, 5)), np.zeros((2, 6)))

    def test_empty(self):
        """Test zero examples raise EmptyInput."""
        with pytest.raises(EmptyInput):
            mae(np.zeros((0, 6)), np.zeros((0, 6)))


class TestSnrBins:
    """Tests for SNR binning."""

    def test_right_closed(self):
        """Test edges belong to the bin they close."""
        assert_array_equal(snr_bin_index([-6.0, -5.9, -1.0, -0.9, 24.0, 24.1]), [0, 1, 1, 2, 6, 7])

    def test_single_bin_populated(self, rng):
        """Test examples at 10 dB fill only (9, 14] and the other rows are empty."""
        trues = rng.uniform(0.1, 1.0, size=(8, 6))
        trues[:, SNR] = 10.0
        preds = trues + 0.1

        table = binned_mae(preds, trues, trues[:, SNR])

        assert len(table) == 6
        assert table["n"].tolist() == [0, 0, 0, 8, 0, 0]
        assert table["empty"].tolist() == [True, True, True, False, True, True]
        assert table.loc[3, "sti"] == pytest.approx(0.1)
        assert np.isnan(table.loc[0, "sti"])

    def test_bins_recombine_to_overall(self, rng):
        """Test the count-weighted mean of bin errors equals the overall error."""
        trues = rng.uniform(0.0, 1.0, size=(300, 6))
        trues[:, SNR] = rng.integers(-5, 25, size=300)
        preds = trues + rng.normal(0.0, 0.2, size=trues.shape)

        table = binned_mae(preds, trues, trues[:, SNR])
        filled = table[~table["empty"]]

        weighted = float((filled["n"] * filled["sti"]).sum() / filled["n"].sum())
        assert weighted == pytest.approx(mae(preds, trues)["sti"])

    def test_snr_length_mismatch(self):
        """Test the SNR vector must align with the examples."""
        with pytest.raises(LengthMismatch):
            binned_mae(np.zeros((2, 6)), np.zeros((2, 6)), [1.0])


class TestCalibration:
    """Tests for calibration_table."""

    def test_columns_and_counts(self, rng):
        """Test every valid example lands in a bin, the maximum included."""
        trues = rng.uniform(0.0, 1.0, size=(200, 6))

        table = calibration_table(trues, trues)

        assert list(table.columns) == CALIBRATION_COLUMNS
        assert table.groupby("param")["n"].sum().to_dict() == {name: 200 for name in TARGET_NAMES}

    def test_perfect_predictor(self, rng):
        """Test exact predictions of discrete truths have zero spread and in-bin means."""
        trues = rng.integers(0, 20, size=(500, 6)).astype(float)
        trues[:2] = [[0.0] * 6, [19.0] * 6]

        table = calibration_table(trues, trues)

        assert len(table) == 120
        assert np.allclose(table["std_pred"], 0.0)
        assert np.all(table["mean_pred"] >= table["bin_lo"] - 1e-12)
        assert np.all(table["mean_pred"] <= table["bin_hi"] + 1e-12)

    def test_constant_predictor(self, rng):
        """Test a constant prediction has that mean and no spread in every bin."""
        trues = rng.uniform(0.0, 1.0, size=(300, 6))
        preds = np.full_like(trues, 0.5)

        table = calibration_table(preds, trues)

        assert np.allclose(table["mean_pred"], 0.5)
        assert np.allclose(table["std_pred"], 0.0)

    def test_noise_spread(self, rng):
        """Test unit Gaussian errors show up as unit spread per bin."""
        trues = np.zeros((10000, 6))
        trues[:, STI] = rng.uniform(0.0, 10.0, size=10000)
        preds = trues + rng.standard_normal(trues.shape)

        table = calibration_table(preds, trues, names=TARGET_NAMES)
        sti = table[table["param"] == "sti"]

        assert len(sti) == 20
        assert sti["std_pred"].mean() == pytest.approx(1.0, abs=0.05)
        assert np.all(np.abs(sti["std_pred"] - 1.0) < 0.2)

    def test_constant_truth(self):
        """Test a constant true value forms a single bin."""
        trues = np.full((5, 1), 2.0)

        table = calibration_table(trues + 1.0, trues, names=("x",))

        assert len(table) == 1
        assert table.loc[0, "n"] == 5
        assert table.loc[0, "mean_pred"] == pytest.approx(3.0)
