"""Tests for the WADA-SNR baseline."""

from unittest.mock import patch

import numpy as np
import pytest

from roomsense.baselines import wada as wada_module
from roomsense.baselines.wada import (
    GAUSSIAN_G,
    WadaTable,
    amplitude_statistic,
    build_wada_table,
    load_or_build_table,
    wada_snr,
)
from roomsense.dsp.signal import Signal
from roomsense.errors import NonMonotoneTable, SilentSignal
from roomsense.noise.generators import gen_white
from roomsense.noise.mixing import scale_to_snr
from roomsense.noise.synthetic import gamma_speech

GAMMA_G = 1.6451


@pytest.fixture(scope="module")
def table():
    return build_wada_table(seed=0, samples_per_point=200_000)


class TestAmplitudeStatistic:
    """Tests for the statistic G."""

    def test_gaussian_constant(self):
        """Test the closed-form Gaussian value."""
        assert GAUSSIAN_G == pytest.approx(0.4094, abs=1e-4)

    def test_gaussian_samples(self, rng):
        """Test simulated Gaussian noise lands on the closed form."""
        assert amplitude_statistic(rng.standard_normal(1_000_000)) == pytest.approx(GAUSSIAN_G, abs=0.005)

    def test_gamma_samples(self):
        """Test Gamma(0.4) amplitudes give ln k - digamma(k)."""
        z = gamma_speech(1_000_000, seed=2).samples

        assert amplitude_statistic(z) == pytest.approx(GAMMA_G, abs=0.02)

    def test_scale_invariant(self, rng):
        """Test the statistic ignores the overall level."""
        z = rng.standard_normal(1000)

        assert amplitude_statistic(3.0 * z) == pytest.approx(amplitude_statistic(z))

    def test_silent(self):
        """Test a signal below the floor raises SilentSignal."""
        with pytest.raises(SilentSignal):
            amplitude_statistic(np.full(100, 1e-12))


class TestWadaTable:
    """Tests for building and using the lookup table."""

    def test_grid_and_end_points(self, table):
        """Test the grid spans -20..100 dB and G runs from Gaussian to Gamma."""
        assert len(table.snr_db) == 241
        assert table.snr_db[0] == -20.0 and table.snr_db[-1] == 100.0
        assert np.all(np.diff(table.g) > 0)
        assert table.g[0] == pytest.approx(GAUSSIAN_G, abs=0.02)
        assert table.g[-1] == pytest.approx(GAMMA_G, abs=0.03)

    def test_lookup_clamps(self, table):
        """Test statistics outside the table map to the grid ends."""
        assert table.lookup(0.0) == -20.0
        assert table.lookup(10.0) == 100.0

    @pytest.mark.parametrize("snr", [0, 10, 20])
    def test_estimates_known_snr(self, table, snr):
        """Test Gamma speech in white noise is estimated near its true SNR."""
        speech = gamma_speech(400_000, seed=5)
        noise = scale_to_snr(speech, gen_white(400_000, 6, 16000), snr)
        mixture = Signal(speech.as_float64() + noise.as_float64(), 16000)

        assert wada_snr(mixture, table) == pytest.approx(snr, abs=1.5)

    def test_non_monotone(self):
        """Test a decreasing step is refused."""
        with pytest.raises(NonMonotoneTable):
            WadaTable(np.array([0.0, 1.0, 2.0]), np.array([0.1, 0.3, 0.2]))

    def test_shape_validation(self):
        """Test grids must be equal-length 1-D arrays."""
        with pytest.raises(ValueError):
            WadaTable(np.array([0.0, 1.0]), np.array([0.1, 0.2, 0.3]))

    def test_save_then_load(self, table, tmp_path):
        """Test a saved table loads back with its stamp."""
        back = WadaTable.load(table.save(tmp_path / "wada.npz"))

        np.testing.assert_array_equal(back.g, table.g)
        assert (back.seed, back.samples_per_point) == (0, 200_000)

    def test_cache_is_reused(self, table, tmp_path):
        """Test a cached table with a matching stamp is loaded instead of rebuilt."""
        path = tmp_path / "wada.npz"

        with patch.object(wada_module, "build_wada_table", return_value=table) as build:
            load_or_build_table(path, seed=0, samples_per_point=200_000)
            load_or_build_table(path, seed=0, samples_per_point=200_000)
            load_or_build_table(path, seed=1, samples_per_point=200_000)

        assert build.call_count == 2
        assert path.exists()

    @pytest.mark.slow
    def test_default_size_is_monotone(self):
        """Test the full-size table builds without a monotonicity failure."""
        table = build_wada_table(seed=1)

        assert np.all(np.diff(table.g) > 0)
