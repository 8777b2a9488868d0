"""Tests for synthetic RIRs, speech stand-ins and on-disk corpora."""

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from roomsense.analysis.decay import estimate_rt60, schroeder_decay
from roomsense.dsp.signal import load_wav
from roomsense.noise.synthetic import (
    exponential_decay,
    exponential_rir,
    gamma_speech,
    speech_like,
    two_slope_rir,
    write_corpus,
)


class TestSyntheticRirs:
    """Tests for analytic impulse responses."""

    def test_exponential_decay_starts_at_one(self):
        """Test the deterministic decay has unit start and the requested length."""
        h = exponential_decay(0.5, 16000, 0.25)

        assert len(h) == 4000
        assert h.samples[0] == pytest.approx(1.0)
        assert h.samples[-1] < h.samples[0]

    def test_exponential_rir_is_seeded_and_normalized(self):
        """Test the same seed gives the same peak-normalized response."""
        a = exponential_rir(0.4, 16000, 0.6, seed=1)
        b = exponential_rir(0.4, 16000, 0.6, seed=1)

        assert_array_equal(a.samples, b.samples)
        assert np.max(np.abs(a.samples)) == pytest.approx(1.0)

    def test_direct_to_reverb_ratio(self):
        """Test the leading impulse carries the requested energy relative to the tail."""
        h = exponential_rir(0.5, 16000, 0.8, seed=4, direct_to_reverb_db=6.0).as_float64()

        ratio = 10 * np.log10(h[0] ** 2 / np.sum(h[1:] ** 2))

        assert ratio == pytest.approx(6.0, abs=1e-3)

    def test_exponential_rir_rt60(self):
        """Test the envelope's reverberation time is recovered."""
        h = exponential_rir(0.6, 16000, 1.0, seed=8)

        assert estimate_rt60(schroeder_decay(h)) == pytest.approx(0.6, rel=0.1)

    def test_two_slope_late_decay_is_slower(self):
        """Test the late part of a double-slope response decays more slowly than the early part."""
        h = two_slope_rir(0.2, 1.0, 15.0, 16000, 1.5, seed=2).as_float64()
        early = np.sum(h[:800] ** 2)
        late = np.sum(h[8000:] ** 2)

        single = exponential_rir(0.2, 16000, 1.5, seed=2).as_float64()

        assert late / early > np.sum(single[8000:] ** 2) / np.sum(single[:800] ** 2)

    def test_rejects_bad_rt60(self):
        """Test non-positive reverberation times are refused."""
        with pytest.raises(ValueError):
            exponential_rir(0.0, 16000, 1.0, seed=1)
        with pytest.raises(ValueError):
            two_slope_rir(0.2, -1.0, 10.0, 16000, 1.0, seed=1)


class TestSpeechStandIns:
    """Tests for speech-like signals."""

    def test_gamma_amplitudes(self):
        """Test mean absolute amplitude equals the Gamma shape."""
        z = gamma_speech(400000, seed=3).as_float64()

        assert np.mean(np.abs(z)) == pytest.approx(0.4, rel=0.02)
        assert np.mean(z) == pytest.approx(0.0, abs=0.01)

    def test_gamma_bad_length(self):
        """Test a non-positive length is refused."""
        with pytest.raises(ValueError):
            gamma_speech(0, seed=1)

    def test_speech_like_has_pauses(self):
        """Test the signal is peak-normalized and alternates activity with gaps."""
        s = speech_like(5.0, 16000, seed=2)
        frames = s.as_float64().reshape(-1, 160)
        energy = np.sum(frames**2, axis=1)

        assert len(s) == 80000
        assert np.max(np.abs(s.samples)) == pytest.approx(1.0)
        assert np.mean(energy < 1e-6 * energy.max()) > 0.05
        assert np.mean(energy > 1e-2 * energy.max()) > 0.3

    def test_speech_like_is_seeded(self):
        """Test the same seed reproduces the signal."""
        assert_array_equal(speech_like(1.0, 16000, 5).samples, speech_like(1.0, 16000, 5).samples)


class TestWriteCorpus:
    """Tests for corpus folders."""

    def test_layout(self, tmp_path):
        """Test speech, RIR and noise folders are written with the returned counts."""
        counts = write_corpus(tmp_path, n_rirs=3, speech_minutes=0.5, seed=1, speech_file_seconds=10, n_noise=3)

        assert counts == {"speech": 3, "rirs": 3, "noise": 3}
        assert len(list((tmp_path / "speech").glob("*.wav"))) == 3
        assert len(list((tmp_path / "rirs").glob("*.wav"))) == 3
        assert len(list((tmp_path / "noise").glob("*.wav"))) == 3
        assert load_wav(tmp_path / "speech" / "speech_0000.wav").sample_rate == 16000

    def test_reproducible(self, tmp_path):
        """Test the same seed writes identical files."""
        write_corpus(tmp_path / "a", n_rirs=2, speech_minutes=0.2, seed=4, speech_file_seconds=6, n_noise=2)
        write_corpus(tmp_path / "b", n_rirs=2, speech_minutes=0.2, seed=4, speech_file_seconds=6, n_noise=2)

        for rel in ("rirs/rir_0001.wav", "noise/noise_0001.wav", "speech/speech_0000.wav"):
            assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()
