"""Tests for the acoustic label schema."""

import numpy as np
import pytest
from pydantic import ValidationError

from roomsense.models.labels import TARGET_NAMES, AcousticLabel, LabelFlag


def make_label(**overrides):
    data = {"rt60": 0.5, "drr": 3.1, "c50": 4.2, "c80": 7.0, "sti": 0.62, "snr": 10.0}
    data.update(overrides)
    return AcousticLabel(**data)


class TestAcousticLabel:
    """Tests for AcousticLabel."""

    def test_to_vector_order(self):
        """Test the vector follows TARGET_NAMES."""
        np.testing.assert_array_equal(make_label().to_vector(), [0.5, 3.1, 4.2, 7.0, 0.62, 10.0])

    def test_from_vector(self):
        """Test a vector maps back onto named fields."""
        label = AcousticLabel.from_vector([1, 2, 3, 4, 0.5, 6], flags=[LabelFlag.SNR_CAPPED])

        assert [getattr(label, name) for name in TARGET_NAMES] == [1, 2, 3, 4, 0.5, 6]
        assert label.flags == [LabelFlag.SNR_CAPPED]

    def test_missing_snr_has_no_vector(self):
        """Test a bare RIR label cannot become a target vector."""
        with pytest.raises(ValueError, match="SNR"):
            make_label(snr=None).to_vector()

    def test_sti_range(self):
        """Test STI outside [0, 1] is rejected."""
        with pytest.raises(ValidationError):
            make_label(sti=1.2)

    def test_negative_rt60(self):
        """Test a negative reverberation time is rejected."""
        with pytest.raises(ValidationError):
            make_label(rt60=-0.1)

    def test_flags_deduplicated_and_sorted(self):
        """Test flags are unique and ordered by value."""
        label = make_label(flags=["snr_capped", LabelFlag.DRR_CAPPED, "snr_capped"])

        assert label.flags == [LabelFlag.DRR_CAPPED, LabelFlag.SNR_CAPPED]

    def test_unknown_flag(self):
        """Test an unknown flag string is rejected."""
        with pytest.raises(ValidationError):
            make_label(flags=["loud"])

    def test_exclusion(self):
        """Test capped fields are excluded from metrics and others are not."""
        label = make_label(flags=[LabelFlag.C50_CAPPED, LabelFlag.STI_BAND_SILENT])

        assert label.is_excluded("c50")
        assert not label.is_excluded("c80")
        assert not label.is_excluded("sti")

    def test_with_snr(self):
        """Test attaching an SNR keeps the label immutable and adds the cap flag."""
        bare = make_label(snr=None)
        capped = bare.with_snr(30, capped=True)

        assert bare.snr is None
        assert capped.snr == 30.0
        assert capped.has_flag(LabelFlag.SNR_CAPPED)

    def test_flag_string_round_trip(self):
        """Test the CSV flag encoding parses back."""
        label = make_label(flags=[LabelFlag.REVERB_FREE, LabelFlag.DRR_CAPPED])

        assert label.flag_string() == "drr_capped|reverb_free"
        assert AcousticLabel.parse_flags(label.flag_string()) == label.flags

    def test_parse_empty_flags(self):
        """Test empty and missing CSV cells mean no flags."""
        assert AcousticLabel.parse_flags("") == []
        assert AcousticLabel.parse_flags(None) == []
        assert AcousticLabel.parse_flags(float("nan")) == []
