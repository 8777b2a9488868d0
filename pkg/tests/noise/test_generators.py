"""Tests for seeded noise sources."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy import signal as sps

from roomsense.dsp.signal import Signal, write_wav
from roomsense.errors import EmptySignal
from roomsense.models.manifest import NoiseKind, NoiseSpec
from roomsense.noise.generators import fit_noise_length, gen_pink, gen_white, load_noise


def spectral_slope(s: Signal, lo: float = 50.0, hi: float = 5000.0) -> float:
    """Least-squares slope of log10 PSD against log10 frequency."""
    f, psd = sps.welch(s.as_float64(), fs=s.sample_rate, nperseg=4096)
    band = (f >= lo) & (f <= hi)
    return float(np.polyfit(np.log10(f[band]), np.log10(psd[band]), 1)[0])


class TestWhiteNoise:
    """Tests for white noise."""

    def test_deterministic_in_seed(self):
        """Test the same seed gives the same samples and another seed does not."""
        assert_array_equal(gen_white(1000, 7, 16000).samples, gen_white(1000, 7, 16000).samples)
        assert not np.array_equal(gen_white(1000, 7, 16000).samples, gen_white(1000, 8, 16000).samples)

    def test_moments(self):
        """Test zero mean and unit variance."""
        x = gen_white(200000, 1, 16000).as_float64()

        assert x.mean() == pytest.approx(0.0, abs=0.01)
        assert x.var() == pytest.approx(1.0, rel=0.02)

    def test_flat_spectrum(self):
        """Test the spectrum is flat."""
        assert spectral_slope(gen_white(320000, 2, 16000)) == pytest.approx(0.0, abs=0.1)

    def test_bad_length(self):
        """Test a non-positive length is refused."""
        with pytest.raises(ValueError):
            gen_white(0, 1, 16000)


class TestPinkNoise:
    """Tests for pink noise."""

    def test_minus_three_db_per_octave(self):
        """Test the power spectrum falls as 1/f."""
        assert spectral_slope(gen_pink(320000, 3, 16000)) == pytest.approx(-1.0, abs=0.15)

    def test_unit_power(self):
        """Test the output is scaled to unit mean power."""
        x = gen_pink(50000, 4, 16000).as_float64()

        assert np.mean(x**2) == pytest.approx(1.0, rel=1e-5)

    def test_deterministic_in_seed(self):
        """Test the same seed gives the same samples."""
        assert_array_equal(gen_pink(5000, 9, 16000).samples, gen_pink(5000, 9, 16000).samples)


class TestFitNoiseLength:
    """Tests for cutting recordings to length."""

    def test_long_recording_is_cut(self):
        """Test a long recording yields a contiguous excerpt."""
        data = np.arange(1000, dtype=np.float64)
        out = fit_noise_length(Signal(data, 16000), 100, seed=5)

        assert len(out) == 100
        assert_array_equal(np.diff(out.as_float64()), np.ones(99))

    def test_offset_is_seeded(self):
        """Test the offset depends only on the seed."""
        noise = Signal(np.arange(1000), 16000)

        a = fit_noise_length(noise, 100, seed=5).samples
        b = fit_noise_length(noise, 100, seed=5).samples

        assert_array_equal(a, b)

    def test_short_recording_is_tiled(self):
        """Test a short recording repeats with its own period."""
        data = np.arange(30, dtype=np.float64)
        out = fit_noise_length(Signal(data, 16000), 100, seed=1).as_float64()

        assert len(out) == 100
        assert_array_equal(out[:70], out[30:])

    def test_empty_recording(self):
        """Test an empty recording raises EmptySignal."""
        with pytest.raises(EmptySignal):
            fit_noise_length(Signal(np.zeros(0), 16000), 10, seed=1)


class TestLoadNoise:
    """Tests for materializing a NoiseSpec."""

    def test_none(self):
        """Test noise-free specs produce no signal."""
        assert load_noise(NoiseSpec(kind=NoiseKind.NONE), 100, 16000) is None

    def test_white_matches_generator(self):
        """Test white specs reproduce gen_white."""
        out = load_noise(NoiseSpec(kind=NoiseKind.WHITE, seed=3), 100, 16000)

        assert_array_equal(out.samples, gen_white(100, 3, 16000).samples)

    def test_real_is_resampled_and_cut(self, tmp_path):
        """Test recordings are brought to the working rate and length."""
        t = np.arange(48000) / 48000
        path = write_wav(Signal(0.5 * np.sin(2 * np.pi * 200 * t), 48000), tmp_path / "n.wav")

        out = load_noise(NoiseSpec(kind=NoiseKind.REAL, source=str(path), seed=2), 8000, 16000)

        assert out.sample_rate == 16000
        assert len(out) == 8000

    def test_spec_validation(self):
        """Test generated noise needs a seed and real noise a source."""
        with pytest.raises(ValueError):
            NoiseSpec(kind=NoiseKind.PINK)
        with pytest.raises(ValueError):
            NoiseSpec(kind=NoiseKind.REAL, seed=1)
