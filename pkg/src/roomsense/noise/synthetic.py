"""
Synthetic source material: analytic RIRs, speech-like signals and small on-disk corpora.

These stand in for recorded speech, RIR and noise collections when none are at hand
(tests, smoke runs, the `synth-corpus` command).
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
from scipy import signal as sps

from roomsense.dsp.signal import Signal, normalize_peak, write_wav
from roomsense.noise.generators import gen_pink, gen_white

logger = logging.getLogger(__name__)

LN_1000 = 3.0 * np.log(10.0)


def _envelope(rt60: float, times: np.ndarray) -> np.ndarray:
    # Amplitude envelope whose energy falls 60 dB per rt60 seconds.
    return np.exp(-LN_1000 * times / rt60)


def exponential_decay(rt60: float, rate: int, duration: float) -> Signal:
    """Noise-free exponential h[i] = exp(-3 ln10 t_i / rt60); its decay curve is a straight line."""
    if rt60 <= 0:
        raise ValueError(f"rt60 must be positive, got {rt60}")
    times = np.arange(int(round(duration * rate))) / rate
    return Signal(_envelope(rt60, times), rate)


def exponential_rir(
    rt60: float,
    rate: int,
    duration: float,
    seed: int,
    direct_to_reverb_db: Optional[float] = None,
) -> Signal:
    """
    Gaussian noise under an exponential envelope, optionally led by a direct impulse.

    Args:
        rt60: Reverberation time of the envelope in seconds
        rate: Sample rate in Hz
        duration: Length of the response in seconds
        seed: Noise seed
        direct_to_reverb_db: Energy of the leading impulse relative to the tail; None for no impulse

    Returns:
        Peak-normalized impulse response
    """
    if rt60 <= 0:
        raise ValueError(f"rt60 must be positive, got {rt60}")
    rng = np.random.default_rng(seed)
    n = int(round(duration * rate))
    times = np.arange(n) / rate
    h = rng.standard_normal(n) * _envelope(rt60, times)
    if direct_to_reverb_db is not None:
        tail_energy = float(np.sum(h[1:] ** 2))
        h[0] = np.sqrt(tail_energy * 10.0 ** (direct_to_reverb_db / 10.0))
    return normalize_peak(Signal(h, rate)).signal


def two_slope_rir(
    rt60_early: float,
    rt60_late: float,
    knee_db: float,
    rate: int,
    duration: float,
    seed: int,
) -> Signal:
    """Noise shaped by the larger of an early and a late exponential envelope (double-slope decay)."""
    if rt60_early <= 0 or rt60_late <= 0:
        raise ValueError("Both reverberation times must be positive")
    rng = np.random.default_rng(seed)
    n = int(round(duration * rate))
    times = np.arange(n) / rate
    late_gain = 10.0 ** (-knee_db / 20.0)
    envelope = np.maximum(_envelope(rt60_early, times), late_gain * _envelope(rt60_late, times))
    return normalize_peak(Signal(rng.standard_normal(n) * envelope, rate)).signal


def gamma_speech(n: int, seed: int, shape: float = 0.4, rate: int = 16000) -> Signal:
    """Random-sign samples with Gamma(shape) distributed amplitudes."""
    if n <= 0:
        raise ValueError(f"Sample count must be positive, got {n}")
    rng = np.random.default_rng(seed)
    amplitudes = rng.gamma(shape, 1.0, n)
    signs = rng.choice(np.array([-1.0, 1.0]), size=n)
    return Signal(amplitudes * signs, rate)


def speech_like(seconds: float, rate: int, seed: int) -> Signal:
    """
    Voiced syllables with pauses, a rough stand-in for running speech.

    Each syllable is a harmonic complex (f0 between 90 and 220 Hz, 1/k harmonic
    roll-off, a slight pitch glide) plus a little breath noise under a Hann envelope.
    Syllables arrive at 3 to 6 per second, with occasional longer pauses.
    """
    n = int(round(seconds * rate))
    if n <= 0:
        raise ValueError(f"Duration must be positive, got {seconds}")
    rng = np.random.default_rng(seed)
    out = np.zeros(n)

    pos = int(rng.integers(0, rate // 10 + 1))
    while pos < n:
        length = int(rng.uniform(0.08, 0.25) * rate)
        stop = min(pos + length, n)
        m = stop - pos
        t = np.arange(m) / rate

        f0 = rng.uniform(90.0, 220.0) * (1.0 + rng.uniform(-0.1, 0.1) * t / max(t[-1], 1e-9))
        phase = 2.0 * np.pi * np.cumsum(f0) / rate
        n_harmonics = max(1, int(0.45 * rate / f0.max()))
        voiced = sum(np.sin(k * phase) / k for k in range(1, min(n_harmonics, 40) + 1))
        breath = 0.05 * rng.standard_normal(m)
        out[pos:stop] += (voiced + breath) * sps.windows.hann(m, sym=False) * rng.uniform(0.3, 1.0)

        gap = rng.uniform(1.0 / 6.0, 1.0 / 3.0) - length / rate
        if rng.random() < 0.1:
            gap += rng.uniform(0.3, 0.6)
        pos = stop + int(max(gap, 0.02) * rate)

    return normalize_peak(Signal(out, rate)).signal


def _hum(n: int, rate: int, seed: int) -> Signal:
    # Mains hum with harmonics over a pink floor, a stand-in for a real-noise recording.
    rng = np.random.default_rng(seed)
    t = np.arange(n) / rate
    base = rng.choice(np.array([50.0, 60.0]))
    hum = sum(np.sin(2 * np.pi * k * base * t + rng.uniform(0, 2 * np.pi)) / k for k in range(1, 6))
    floor = gen_pink(n, int(rng.integers(0, 2**32)), rate).as_float64()
    return Signal(hum + 0.3 * floor, rate)


def write_corpus(
    out_dir: Union[str, Path],
    n_rirs: int,
    speech_minutes: float,
    seed: int,
    rate: int = 16000,
    speech_file_seconds: float = 20.0,
    n_noise: int = 5,
) -> Dict[str, int]:
    """
    Write a synthetic speech/RIR/noise corpus laid out for `gen-manifest`.

    Creates `speech/`, `rirs/` and `noise/` under `out_dir`. RIR reverberation times are
    drawn log-uniformly over 0.2 to 2.0 s; a quarter of them decay in two slopes.

    Returns:
        Number of files written per folder
    """
    out_dir = Path(out_dir)
    root = np.random.SeedSequence(seed)
    speech_seq, rir_seq, noise_seq = root.spawn(3)

    n_speech = max(1, int(round(speech_minutes * 60.0 / speech_file_seconds)))
    for i, child in enumerate(speech_seq.spawn(n_speech)):
        s = speech_like(speech_file_seconds, rate, int(child.generate_state(1)[0]))
        write_wav(s, out_dir / "speech" / f"speech_{i:04d}.wav")
    logger.info(f"Wrote {n_speech} speech files")

    for i, child in enumerate(rir_seq.spawn(n_rirs)):
        rng = np.random.default_rng(child)
        rt60 = float(np.exp(rng.uniform(np.log(0.2), np.log(2.0))))
        duration = 1.5 * rt60 + 0.1
        rir_seed = int(rng.integers(0, 2**32))
        if rng.random() < 0.25:
            h = two_slope_rir(rt60 * 0.6, rt60, rng.uniform(10.0, 20.0), rate, duration, rir_seed)
        else:
            h = exponential_rir(rt60, rate, duration, rir_seed, rng.uniform(-6.0, 12.0))
        write_wav(h, out_dir / "rirs" / f"rir_{i:04d}.wav")
    logger.info(f"Wrote {n_rirs} impulse responses")

    for i, child in enumerate(noise_seq.spawn(n_noise)):
        rng = np.random.default_rng(child)
        n = int(rng.uniform(3.0, 12.0) * rate)
        kind = i % 3
        if kind == 0:
            noise = _hum(n, rate, int(rng.integers(0, 2**32)))
        elif kind == 1:
            brown = np.cumsum(gen_white(n, int(rng.integers(0, 2**32)), rate).as_float64())
            noise = Signal(sps.detrend(brown), rate)
        else:
            noise = gen_pink(n, int(rng.integers(0, 2**32)), rate)
        write_wav(normalize_peak(noise).signal, out_dir / "noise" / f"noise_{i:04d}.wav")
    logger.info(f"Wrote {n_noise} noise recordings")

    return {"speech": n_speech, "rirs": n_rirs, "noise": n_noise}
