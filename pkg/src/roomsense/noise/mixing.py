"""
Scaling noise to an exact SNR against a speech signal.
"""

import logging

import numpy as np

from roomsense.dsp.signal import Signal, mean_power
from roomsense.errors import SampleRateMismatch, SilentNoise, SilentSpeech

logger = logging.getLogger(__name__)


def snr_gain(speech_power: float, noise_power: float, target_db: float) -> float:
    """Amplitude gain g with 10 log10(Px / (g^2 Pn)) == target_db."""
    return float(np.sqrt(speech_power / (noise_power * 10.0 ** (target_db / 10.0))))


def scale_to_snr(speech: Signal, noise: Signal, target: float) -> Signal:
    """
    Truncate `noise` to len(speech) and scale it to sit `target` dB below the speech.

    SNR is measured on whole-signal mean power, without activity weighting.

    Raises:
        SampleRateMismatch: If the two signals disagree on sample rate
        SilentSpeech: If the speech has zero power
        SilentNoise: If the truncated noise has zero power
    """
    if speech.sample_rate != noise.sample_rate:
        raise SampleRateMismatch(
            f"Speech at {speech.sample_rate} Hz, noise at {noise.sample_rate} Hz"
        )
    if len(noise) < len(speech):
        raise ValueError(f"Noise ({len(noise)} samples) is shorter than speech ({len(speech)})")

    noise = noise.slice(0, len(speech))
    p_speech = mean_power(speech)
    if p_speech == 0.0:
        raise SilentSpeech("Speech has zero power; SNR is undefined")
    p_noise = mean_power(noise)
    if p_noise == 0.0:
        raise SilentNoise("Noise has zero power and cannot be scaled")

    g = snr_gain(p_speech, p_noise, target)
    return Signal(noise.as_float64() * g, speech.sample_rate)


def measure_snr(speech: Signal, noise: Signal) -> float:
    """10 log10 of the speech-to-noise mean power ratio."""
    return float(10.0 * np.log10(mean_power(speech) / mean_power(noise)))
