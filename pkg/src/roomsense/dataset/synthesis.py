"""
Example synthesis: y = x * h + n, chunked to a fixed length and peak-normalized.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from roomsense.analysis.decay import DEFAULT_DB_FLOOR, DEFAULT_ONSET_THRESHOLD, align_onset
from roomsense.analysis.rir import analyze_rir
from roomsense.dsp.signal import Signal, convolve, load_wav, normalize_peak, resample
from roomsense.errors import ChunkTooShort
from roomsense.models.labels import AcousticLabel, LabelFlag
from roomsense.models.manifest import DatasetManifest, ExampleRecipe
from roomsense.noise.generators import load_noise
from roomsense.noise.mixing import scale_to_snr

logger = logging.getLogger(__name__)


class SynthesisParams(BaseModel):
    """Manifest-level constants every recipe is synthesized under."""

    sample_rate: int = Field(16000, gt=0)
    chunk_samples: int = Field(128000, gt=0)
    ratio_cap_db: float = 60.0
    clean_snr_cap_db: float = 30.0
    onset_threshold: float = DEFAULT_ONSET_THRESHOLD
    db_floor: float = DEFAULT_DB_FLOOR

    @classmethod
    def from_manifest(cls, manifest: DatasetManifest) -> "SynthesisParams":
        return cls(
            sample_rate=manifest.sample_rate,
            chunk_samples=manifest.chunk_samples,
            ratio_cap_db=manifest.ratio_cap_db,
            clean_snr_cap_db=manifest.clean_snr_cap_db,
            onset_threshold=manifest.onset_threshold,
            db_floor=manifest.db_floor,
        )


@dataclass(frozen=True)
class SynthesizedExample:
    """A mixed chunk, its label, and the two scaled components it was summed from."""

    signal: Signal
    label: AcousticLabel
    speech: Signal
    noise: Optional[Signal]
    silent: bool = False


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed for recipe `index`, independent of processing order."""
    state = np.random.SeedSequence([master_seed, index]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def count_chunks(n_samples: int, chunk_samples: int) -> int:
    """Number of whole, non-overlapping chunks in `n_samples`; partial remainders are dropped."""
    return n_samples // chunk_samples


def load_source(path: str, rate: int) -> Signal:
    """Load a WAV as mono and bring it to `rate`."""
    s = load_wav(path)
    return s if s.sample_rate == rate else resample(s, rate)


@lru_cache(maxsize=512)
def _load_rir(path: str, rate: int, onset_threshold: float) -> Signal:
    return align_onset(load_source(path, rate), onset_threshold)


def reverb_free_label(ratio_cap_db: float) -> AcousticLabel:
    """Label of a dry example: no decay, perfect intelligibility, ratios at the cap."""
    return AcousticLabel(
        rt60=0.0,
        drr=ratio_cap_db,
        c50=ratio_cap_db,
        c80=ratio_cap_db,
        sti=1.0,
        flags=[
            LabelFlag.REVERB_FREE,
            LabelFlag.DRR_CAPPED,
            LabelFlag.C50_CAPPED,
            LabelFlag.C80_CAPPED,
        ],
    )


def attach_snr(
    label: AcousticLabel, target_snr: Optional[int], clean_snr_cap_db: float
) -> AcousticLabel:
    """Add the mixing SNR, or the clean cap (flagged) when there is no noise."""
    if target_snr is None:
        return label.with_snr(clean_snr_cap_db, capped=True)
    return label.with_snr(float(target_snr))


def label_for_recipe(recipe: ExampleRecipe, params: SynthesisParams) -> AcousticLabel:
    """Ground-truth label of a recipe; depends only on its RIR and target SNR."""
    if recipe.rir is None:
        rir_label = reverb_free_label(params.ratio_cap_db)
    else:
        rir_label = analyze_rir(
            load_source(recipe.rir, params.sample_rate),
            ratio_cap_db=params.ratio_cap_db,
            onset_threshold=params.onset_threshold,
            db_floor=params.db_floor,
        )
    return attach_snr(rir_label, recipe.target_snr, params.clean_snr_cap_db)


def reverberant_chunk(x: Signal, h: Optional[Signal], chunk_index: int, n: int) -> Signal:
    """
    Samples [c*n, (c+1)*n) of x convolved with h.

    Only the stretch of x that reaches the chunk is convolved, so the result equals the
    same slice of the full convolution. Reverberation from speech before the chunk
    carries into it.

    Raises:
        ChunkTooShort: If x has fewer than (c+1)*n samples
    """
    start, stop = chunk_index * n, (chunk_index + 1) * n
    if stop > len(x):
        raise ChunkTooShort(
            f"Chunk {chunk_index} needs {stop} samples, source has {len(x)} "
            f"({len(x) / x.sample_rate:.2f} s)"
        )
    if h is None:
        return x.slice(start, stop)

    seg_start = max(0, start - len(h) + 1)
    y = convolve(x.slice(seg_start, stop), h)
    offset = start - seg_start
    return y.slice(offset, offset + n)


def synthesize_example(
    recipe: ExampleRecipe, params: Optional[SynthesisParams] = None
) -> SynthesizedExample:
    """
    Build one labeled example from its recipe.

    Pipeline: load at the working rate, convolve with the onset-aligned RIR, cut the
    requested chunk, add noise scaled against the reverberant chunk, peak-normalize.
    The returned components carry the same normalization gain as the mixture.

    Raises:
        ChunkTooShort: If the speech file does not contain the requested chunk
        SilentSpeech: If the reverberant chunk has zero power and noise is requested
    """
    params = params or SynthesisParams()
    rate, n = params.sample_rate, params.chunk_samples

    x = load_source(recipe.speech.path, rate)
    h = None
    if recipe.rir is not None:
        h = _load_rir(recipe.rir, rate, params.onset_threshold)
    speech = reverberant_chunk(x, h, recipe.speech.chunk_index, n)

    noise = load_noise(recipe.noise, n, rate)
    mixture = speech.as_float64()
    if noise is not None:
        noise = scale_to_snr(speech, noise, float(recipe.target_snr))
        mixture = mixture + noise.as_float64()

    peak = float(np.max(np.abs(mixture)))
    normalized = normalize_peak(Signal(mixture, rate))
    if normalized.silent:
        logger.warning(f"Example {recipe.example_name} is silent after mixing")
    gain = 1.0 if normalized.silent else 1.0 / peak

    label = recipe.label if recipe.label is not None else label_for_recipe(recipe, params)
    if normalized.silent:
        label = AcousticLabel(
            **label.model_dump(exclude={"flags"}), flags=[*label.flags, LabelFlag.SILENT_INPUT]
        )

    return SynthesizedExample(
        signal=normalized.signal,
        label=label,
        speech=Signal(speech.as_float64() * gain, rate),
        noise=None if noise is None else Signal(noise.as_float64() * gain, rate),
        silent=normalized.silent,
    )
