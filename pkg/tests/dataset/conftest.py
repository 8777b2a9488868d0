"""Fixtures for dataset tests: a small synthetic corpus and matching settings."""

from pathlib import Path

import pytest

from roomsense.config.settings import Settings
from roomsense.noise.synthetic import write_corpus


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> Path:
    """Six 5 s speech files, six RIRs and three noise recordings."""
    root = tmp_path_factory.mktemp("corpus")
    write_corpus(root, n_rirs=6, speech_minutes=0.5, seed=21, speech_file_seconds=5.0, n_noise=3)
    return root


@pytest.fixture
def corpus_files(corpus_dir):
    def listing(name):
        return sorted(str(p) for p in (corpus_dir / name).glob("*.wav"))

    return listing("speech"), listing("rirs"), listing("noise")


@pytest.fixture
def small_settings() -> Settings:
    """One-second chunks and an even RIR split so both splits get several responses."""
    return Settings(_env_file=None, chunk_seconds=1.0, rir_train_fraction=0.5, jobs=1)
