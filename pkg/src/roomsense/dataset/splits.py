"""
Seeded train/test partitioning of source files.
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from roomsense.errors import EmptySourceList
from roomsense.models.manifest import Split, SplitConfig

logger = logging.getLogger(__name__)

# Independent RNG stream per source kind so adding noise files never reshuffles speech.
_STREAMS = {"speech": 0, "rir": 1, "noise": 2}

WAV_SUFFIXES = {".wav", ".wave"}


def list_wavs(directory: Union[str, Path]) -> List[str]:
    """Sorted WAV files directly below (or anywhere under) `directory`."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Directory not found: {directory}")
    return sorted(str(p) for p in directory.rglob("*") if p.suffix.lower() in WAV_SUFFIXES)


def _partition(
    files: Sequence[str], fraction: float, master_seed: int, stream: str
) -> Tuple[List[str], List[str]]:
    ordered = sorted(files)
    rng = np.random.default_rng(np.random.SeedSequence([master_seed, _STREAMS[stream]]))
    order = rng.permutation(len(ordered))
    n_train = int(round(fraction * len(ordered)))
    train = [ordered[i] for i in order[:n_train]]
    test = [ordered[i] for i in order[n_train:]]
    return sorted(train), sorted(test)


def make_splits(
    speech_files: Sequence[str],
    rir_files: Sequence[str],
    master_seed: int,
    speech_fraction: float = 0.8,
    rir_fraction: float = 306 / 406,
    noise_files: Optional[Sequence[str]] = None,
    noise_fraction: float = 0.8,
) -> SplitConfig:
    """
    Shuffle each source list with a seeded permutation and cut it into train/test.

    The train share of n files is round(fraction * n). Input order does not matter:
    lists are sorted before shuffling, so the assignment depends only on the file set
    and the seed.

    Raises:
        EmptySourceList: If there are no speech or no RIR files
    """
    if not speech_files:
        raise EmptySourceList("No speech files to split")
    if not rir_files:
        raise EmptySourceList("No RIR files to split")

    speech_train, speech_test = _partition(speech_files, speech_fraction, master_seed, "speech")
    rir_train, rir_test = _partition(rir_files, rir_fraction, master_seed, "rir")
    noise_train, noise_test = _partition(noise_files or [], noise_fraction, master_seed, "noise")

    logger.info(
        f"Split sources: speech {len(speech_train)}/{len(speech_test)}, "
        f"rirs {len(rir_train)}/{len(rir_test)}, noise {len(noise_train)}/{len(noise_test)}"
    )
    return SplitConfig(
        speech_train_fraction=speech_fraction,
        rir_train_fraction=rir_fraction,
        noise_train_fraction=noise_fraction,
        speech_train=speech_train,
        speech_test=speech_test,
        rir_train=rir_train,
        rir_test=rir_test,
        noise_train=noise_train,
        noise_test=noise_test,
    )


def split_of(config: SplitConfig, path: str) -> Optional[Split]:
    """Which split a source file was assigned to, or None if it is not part of the config."""
    if path in config.speech_train or path in config.rir_train or path in config.noise_train:
        return Split.TRAIN
    if path in config.speech_test or path in config.rir_test or path in config.noise_test:
        return Split.TEST
    return None


def sources_for(config: SplitConfig, split: Split) -> Tuple[List[str], List[str], List[str]]:
    """(speech, rirs, noise) lists of one split."""
    if split == Split.TRAIN:
        return config.speech_train, config.rir_train, config.noise_train
    return config.speech_test, config.rir_test, config.noise_test
