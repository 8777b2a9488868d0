"""
Manifest generation: draws `count` example recipes from speech, RIR and noise collections.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import soundfile as sf

from roomsense.analysis.rir import ANALYZER_VERSION, analyze_rir
from roomsense.config.settings import Settings, get_settings
from roomsense.dataset.splits import make_splits, sources_for
from roomsense.dataset.synthesis import (
    SynthesisParams,
    attach_snr,
    count_chunks,
    derive_seed,
    load_source,
    reverb_free_label,
)
from roomsense.errors import EmptySourceList, RoomSenseError
from roomsense.models.labels import AcousticLabel, LabelFlag
from roomsense.models.manifest import (
    DatasetManifest,
    ExampleRecipe,
    NoiseKind,
    NoiseSpec,
    SpeechRef,
    Split,
)

logger = logging.getLogger(__name__)

TRAIN_EXAMPLE_FRACTION = 0.8


def speech_chunks(paths: Sequence[str], rate: int, chunk_samples: int) -> List[SpeechRef]:
    """Every whole chunk available in `paths`, read from headers only."""
    refs = []
    for path in paths:
        info = sf.info(path)
        n = int(round(info.frames * rate / info.samplerate))
        chunks = count_chunks(n, chunk_samples)
        if chunks == 0:
            logger.warning(f"{path} is shorter than one chunk; skipped")
        refs.extend(SpeechRef(path=path, chunk_index=c) for c in range(chunks))
    return refs


def _analyze_path(job: Tuple[str, SynthesisParams]) -> Tuple[str, Optional[AcousticLabel], str]:
    path, params = job
    try:
        label = analyze_rir(
            load_source(path, params.sample_rate),
            ratio_cap_db=params.ratio_cap_db,
            onset_threshold=params.onset_threshold,
            db_floor=params.db_floor,
        )
        return path, label, ""
    except (RoomSenseError, OSError, RuntimeError) as e:
        return path, None, f"{type(e).__name__}: {e}"


def analyze_rirs(
    paths: Sequence[str], params: SynthesisParams, jobs: int = 1
) -> Dict[str, AcousticLabel]:
    """
    Label every RIR once; unusable responses are dropped with a warning.

    An RIR whose RT60 cannot be fitted is unusable as a training target and is dropped too.
    """
    work = [(path, params) for path in paths]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_analyze_path, work))
    else:
        results = [_analyze_path(job) for job in work]

    labels = {}
    for path, label, error in results:
        if label is None:
            logger.warning(f"Rejecting RIR {path}: {error}")
        elif label.has_flag(LabelFlag.RT60_INVALID):
            logger.warning(f"Rejecting RIR {path}: RT60 could not be fitted")
        else:
            labels[path] = label
    return labels


def generate_manifest(
    speech_files: Sequence[str],
    rir_files: Sequence[str],
    noise_files: Sequence[str],
    count: int,
    master_seed: int,
    settings: Optional[Settings] = None,
    jobs: Optional[int] = None,
) -> DatasetManifest:
    """
    Draw `count` recipes; the first round(0.8 * count) are train examples, the rest test.

    Recipe i draws from its own RNG seeded by (master_seed, i): a speech chunk, whether
    it is reverb-free, an RIR, whether it is noise-free, a noise kind (white, pink or a
    real recording when the split has any) and an integer SNR in [snr_min_db, snr_max_db].
    Speech, RIR and noise sources of a recipe all come from the recipe's split.

    Raises:
        EmptySourceList: If a split ends up with no usable speech chunk or RIR
    """
    from roomsense import __version__

    if count <= 0:
        raise ValueError(f"count must be positive, got {count}")
    settings = settings or get_settings()
    jobs = jobs or settings.jobs
    params = SynthesisParams(
        sample_rate=settings.sample_rate,
        chunk_samples=settings.chunk_samples,
        ratio_cap_db=settings.ratio_cap_db,
        clean_snr_cap_db=settings.clean_snr_cap_db,
        onset_threshold=settings.onset_threshold,
        db_floor=settings.db_floor,
    )

    split_config = make_splits(
        speech_files,
        rir_files,
        master_seed,
        speech_fraction=settings.speech_train_fraction,
        rir_fraction=settings.rir_train_fraction,
        noise_files=noise_files,
        noise_fraction=settings.noise_train_fraction,
    )
    rir_labels = analyze_rirs(split_config.rir_train + split_config.rir_test, params, jobs)

    pools = {}
    for split in (Split.TRAIN, Split.TEST):
        speech, rirs, noise = sources_for(split_config, split)
        chunks = speech_chunks(speech, params.sample_rate, params.chunk_samples)
        usable_rirs = [path for path in rirs if path in rir_labels]
        if not chunks:
            raise EmptySourceList(f"No {split.value} speech file holds a full chunk")
        if not usable_rirs:
            raise EmptySourceList(f"No usable {split.value} RIR")
        pools[split] = (chunks, usable_rirs, list(noise))

    n_train = int(round(TRAIN_EXAMPLE_FRACTION * count))
    entries = []
    for i in range(count):
        split = Split.TRAIN if i < n_train else Split.TEST
        chunks, rirs, noise = pools[split]
        rng = np.random.default_rng(derive_seed(master_seed, i))

        speech_ref = chunks[int(rng.integers(len(chunks)))]

        rir: Optional[str] = None
        if rng.random() >= settings.reverb_free_fraction:
            rir = rirs[int(rng.integers(len(rirs)))]

        noise_seed = int(rng.integers(0, 2**63))
        if rng.random() < settings.noise_free_fraction:
            noise_spec = NoiseSpec(kind=NoiseKind.NONE)
            target_snr = None
        else:
            kinds = [NoiseKind.WHITE, NoiseKind.PINK] + ([NoiseKind.REAL] if noise else [])
            kind = kinds[int(rng.integers(len(kinds)))]
            source = noise[int(rng.integers(len(noise)))] if kind == NoiseKind.REAL else None
            noise_spec = NoiseSpec(kind=kind, source=source, seed=noise_seed)
            target_snr = int(rng.integers(settings.snr_min_db, settings.snr_max_db + 1))

        base = rir_labels[rir] if rir is not None else reverb_free_label(params.ratio_cap_db)
        entries.append(
            ExampleRecipe(
                id=i,
                speech=speech_ref,
                rir=rir,
                noise=noise_spec,
                target_snr=target_snr,
                split=split,
                label=attach_snr(base, target_snr, params.clean_snr_cap_db),
            )
        )

    logger.info(f"Generated {len(entries)} recipes ({n_train} train, {count - n_train} test)")
    return DatasetManifest(
        master_seed=master_seed,
        sample_rate=params.sample_rate,
        chunk_samples=params.chunk_samples,
        ratio_cap_db=params.ratio_cap_db,
        clean_snr_cap_db=params.clean_snr_cap_db,
        onset_threshold=params.onset_threshold,
        db_floor=params.db_floor,
        analyzer_version=ANALYZER_VERSION,
        package_version=__version__,
        split_config=split_config,
        entries=entries,
    )
