"""Noise generation, SNR scaling and synthetic source corpora."""

from roomsense.noise.generators import fit_noise_length, gen_pink, gen_white, load_noise
from roomsense.noise.mixing import measure_snr, scale_to_snr, snr_gain
from roomsense.noise.synthetic import (
    exponential_decay,
    exponential_rir,
    gamma_speech,
    speech_like,
    two_slope_rir,
    write_corpus,
)

__all__ = [
    "exponential_decay",
    "exponential_rir",
    "fit_noise_length",
    "gamma_speech",
    "gen_pink",
    "gen_white",
    "load_noise",
    "measure_snr",
    "scale_to_snr",
    "snr_gain",
    "speech_like",
    "two_slope_rir",
    "write_corpus",
]
