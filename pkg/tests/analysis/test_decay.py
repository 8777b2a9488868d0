"""Tests for onset alignment, decay curves, RT60 and energy ratios."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from roomsense.analysis.decay import (
    DecayCurve,
    align_onset,
    energy_ratio,
    estimate_rt60,
    schroeder_decay,
    split_index,
)
from roomsense.dsp.signal import Signal
from roomsense.errors import AllZeroRir, DegenerateFit, InsufficientDecayRange, ZeroLateEnergy
from roomsense.noise.synthetic import exponential_decay


class TestAlignOnset:
    """Tests for onset alignment."""

    def test_drops_leading_samples(self):
        """Test everything before the first sample at 5% of the peak is removed."""
        h = np.zeros(20)
        h[5] = 0.01
        h[8] = -1.0
        h[9] = 0.5

        aligned = align_onset(Signal(h, 16000))

        assert len(aligned) == 12
        assert aligned.samples[0] == pytest.approx(-1.0)

    def test_already_aligned(self, unit_impulse):
        """Test an RIR starting at its peak is returned as is."""
        assert align_onset(unit_impulse) is unit_impulse

    def test_all_zero(self):
        """Test an all-zero RIR raises AllZeroRir."""
        with pytest.raises(AllZeroRir):
            align_onset(Signal(np.zeros(10), 16000))


class TestSchroederDecay:
    """Tests for backward integration."""

    def test_hand_computed_curve(self):
        """Test energies [0.5, 0.25, 0.25] give [0, -3.01, -6.02] dB."""
        h = Signal(np.sqrt([0.5, 0.25, 0.25]), 16000)

        d = schroeder_decay(h)

        assert_allclose(d.levels, [0.0, -3.0103, -6.0206], atol=1e-3)

    def test_monotone_and_floored(self, rng):
        """Test the curve never rises and never drops below the floor."""
        h = Signal(np.concatenate([rng.standard_normal(500), np.zeros(500)]), 16000)

        d = schroeder_decay(h, floor_db=-100.0)

        assert d.levels[0] == 0.0
        assert np.all(np.diff(d.levels) <= 1e-9)
        assert d.levels.min() == pytest.approx(-100.0)

    def test_all_zero(self):
        """Test an all-zero RIR raises AllZeroRir."""
        with pytest.raises(AllZeroRir):
            schroeder_decay(Signal(np.zeros(10), 16000))


class TestEstimateRt60:
    """Tests for the decay-line fit."""

    @pytest.mark.parametrize("rt60", [0.3, 0.8, 1.5])
    def test_exponential_decay(self, rt60):
        """Test RT60 of an ideal exponential is recovered within 2%."""
        h = exponential_decay(rt60, 16000, 1.5 * rt60)

        assert estimate_rt60(schroeder_decay(h)) == pytest.approx(rt60, rel=0.02)

    def test_straight_line(self):
        """Test a -120 dB/s line gives 0.5 s."""
        d = DecayCurve.from_slope(-120.0, 1.0, 16000)

        assert estimate_rt60(d) == pytest.approx(0.5, rel=1e-9)

    def test_pure_impulse_has_no_decay_range(self, unit_impulse):
        """Test a curve that drops straight to the floor is rejected."""
        with pytest.raises(InsufficientDecayRange):
            estimate_rt60(schroeder_decay(unit_impulse))

    def test_too_few_points(self):
        """Test a curve that jumps across the fit window is rejected."""
        d = DecayCurve(np.arange(5) / 16000, np.array([0.0, -2.0, -4.0, -36.0, -40.0]))

        with pytest.raises(DegenerateFit):
            estimate_rt60(d)

    def test_mismatched_arrays(self):
        """Test times and levels must align."""
        with pytest.raises(ValueError):
            DecayCurve(np.arange(3), np.zeros(4))


class TestEnergyRatio:
    """Tests for early/late ratios."""

    def test_split_index(self):
        """Test split sample counts, rounding up partial samples."""
        assert split_index(50.0, 16000) == 800
        assert split_index(2.5, 16000) == 40
        assert split_index(2.5, 44100) == 111
        assert split_index(80.0, 44100) == 3528

    def test_nine_to_one(self):
        """Test early energy 9 against late energy 1 gives 9.54 dB."""
        h = np.zeros(2000)
        h[0] = 3.0
        h[800] = 1.0

        assert energy_ratio(Signal(h, 16000), 50.0) == pytest.approx(9.5424, abs=1e-3)

    def test_boundary_sample_is_late(self):
        """Test the sample at exactly the split time counts as late."""
        h = np.zeros(2000)
        h[799] = 1.0
        h[800] = 1.0

        assert energy_ratio(Signal(h, 16000), 50.0) == pytest.approx(0.0, abs=1e-9)

    def test_zero_late_energy(self, unit_impulse):
        """Test an RIR with nothing after the split raises ZeroLateEnergy."""
        with pytest.raises(ZeroLateEnergy):
            energy_ratio(unit_impulse, 50.0)

    def test_zero_early_energy(self):
        """Test an RIR with nothing before the split gives the floor value."""
        h = np.zeros(2000)
        h[900] = 1.0

        assert energy_ratio(Signal(h, 16000), 50.0) == pytest.approx(-120.0)

    def test_matches_direct_summation(self, rng):
        """Test random RIRs against an independent summation."""
        for _ in range(20):
            h = rng.standard_normal(3000) * np.exp(-np.arange(3000) / 600)
            early = np.sum(h[:1280] ** 2)
            late = np.sum(h[1280:] ** 2)

            value = energy_ratio(Signal(h, 16000), 80.0)

            assert value == pytest.approx(10 * np.log10(early / late), abs=0.01)
