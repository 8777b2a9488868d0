"""
Dataset builder: synthesizes every recipe of a manifest to disk.

Output layout under the dataset directory:

    wav/000000.wav ...   peak-normalized FLOAT32 chunks
    labels.csv           one row per successfully built example
    manifest.json        the input manifest with train-split label statistics filled in
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from roomsense.config.settings import Settings, get_settings
from roomsense.dataset.synthesis import SynthesisParams, synthesize_example
from roomsense.dsp.signal import write_wav
from roomsense.errors import EmptySplit, OutputNotWritable, RoomSenseError
from roomsense.models.labels import TARGET_NAMES, AcousticLabel
from roomsense.models.manifest import DatasetManifest, ExampleRecipe, LabelStats, Split

logger = logging.getLogger(__name__)

LABEL_COLUMNS = ["id", "split", "rt60_s", "drr_db", "c50_db", "c80_db", "sti", "snr_db", "flags"]
_VALUE_COLUMNS = dict(zip(TARGET_NAMES, LABEL_COLUMNS[2:8]))

LABELS_FILENAME = "labels.csv"
MANIFEST_FILENAME = "manifest.json"
WAV_DIRNAME = "wav"

# Lower bound on a stored standard deviation so constant targets stay invertible.
MIN_LABEL_STD = 1e-6


def label_row(example_id: int, split: Split, label: AcousticLabel) -> Dict[str, Any]:
    row: Dict[str, Any] = {"id": example_id, "split": split.value}
    for name, column in _VALUE_COLUMNS.items():
        row[column] = getattr(label, name)
    row["flags"] = label.flag_string()
    return row


def write_labels(rows: Iterable[Dict[str, Any]], path: Union[str, Path]) -> Path:
    """Write label rows sorted by id with a fixed float format (byte-stable across runs)."""
    path = Path(path)
    df = pd.DataFrame(list(rows), columns=LABEL_COLUMNS).sort_values("id")
    df.to_csv(path, index=False, float_format="%.6f")
    return path


def read_labels(path: Union[str, Path]) -> pd.DataFrame:
    """Load a label CSV; `flags` comes back as a string column ('' when unflagged)."""
    df = pd.read_csv(path, dtype={"id": int, "split": str, "flags": str}, keep_default_na=False)
    missing = set(LABEL_COLUMNS) - set(df.columns)
    if missing:
        raise ValueError(f"{path} is missing label columns: {sorted(missing)}")
    return df


def labels_from_frame(df: pd.DataFrame) -> List[Tuple[int, Split, AcousticLabel]]:
    """Rebuild (id, split, label) triples from a label table."""
    out = []
    for row in df.itertuples(index=False):
        values = {name: float(getattr(row, column)) for name, column in _VALUE_COLUMNS.items()}
        label = AcousticLabel(**values, flags=AcousticLabel.parse_flags(row.flags))
        out.append((int(row.id), Split(row.split), label))
    return out


def compute_label_stats(labels: List[AcousticLabel]) -> LabelStats:
    """
    Per-target mean and population standard deviation.

    Raises:
        EmptySplit: If no labels are given
    """
    if not labels:
        raise EmptySplit("Cannot compute label statistics over zero examples")
    matrix = np.vstack([label.to_vector() for label in labels])
    mean = matrix.mean(axis=0)
    std = np.maximum(matrix.std(axis=0, ddof=0), MIN_LABEL_STD)
    return LabelStats(
        mean=dict(zip(TARGET_NAMES, mean.tolist())),
        std=dict(zip(TARGET_NAMES, std.tolist())),
        count=len(labels),
    )


def _build_one(
    job: Tuple[ExampleRecipe, SynthesisParams, str]
) -> Tuple[int, Optional[Dict[str, Any]], Optional[str]]:
    # Runs in worker processes: writes its own WAV, returns the label row or an error.
    recipe, params, wav_dir = job
    try:
        example = synthesize_example(recipe, params)
        write_wav(example.signal, Path(wav_dir) / f"{recipe.example_name}.wav")
        return recipe.id, label_row(recipe.id, recipe.split, example.label), None
    except (RoomSenseError, OSError, ValueError, RuntimeError) as e:
        # soundfile reports unreadable files as RuntimeError
        return recipe.id, None, f"{type(e).__name__}: {e}"


class DatasetBuilder:
    """
    Synthesizes a manifest into a dataset directory.

    Failed recipes are logged and skipped; counters mirror what ended up on disk.

    Usage:
        builder = DatasetBuilder()
        manifest = builder.build(DatasetManifest.load("m.json"), "data/", jobs=4)
        builder.log_stats()
    """

    def __init__(self, settings: Optional[Settings] = None):
        """
        Initialize the builder.

        Args:
            settings: Configuration settings (uses global settings if not provided)
        """
        self.settings = settings or get_settings()
        self.built_count = 0
        self.error_count = 0
        self.failures: Dict[int, str] = {}

    def _prepare(self, out_dir: Path) -> Path:
        wav_dir = out_dir / WAV_DIRNAME
        try:
            wav_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise OutputNotWritable(f"Cannot create {wav_dir}: {e}") from e
        marker = out_dir / ".write-test"
        try:
            marker.write_bytes(b"")
            marker.unlink()
        except OSError as e:
            raise OutputNotWritable(f"{out_dir} is not writable: {e}") from e
        return wav_dir

    def build(
        self,
        manifest: DatasetManifest,
        out_dir: Union[str, Path],
        jobs: Optional[int] = None,
        progress_every: int = 100,
    ) -> DatasetManifest:
        """
        Synthesize every recipe and write WAVs, labels and the completed manifest.

        Args:
            manifest: Recipes to build
            out_dir: Dataset directory (created if missing)
            jobs: Worker processes (settings.jobs if not provided)
            progress_every: Log progress after this many examples

        Returns:
            The manifest with label_stats computed over built train examples

        Raises:
            OutputNotWritable: If out_dir cannot be created or written
        """
        out_dir = Path(out_dir)
        wav_dir = self._prepare(out_dir)
        jobs = jobs or self.settings.jobs
        params = SynthesisParams.from_manifest(manifest)
        work = [(recipe, params, str(wav_dir)) for recipe in manifest.entries]

        logger.info(f"Building {len(work)} examples into {out_dir} with {jobs} worker(s)")
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(self._track(pool.map(_build_one, work, chunksize=4), progress_every))
        else:
            results = list(self._track(map(_build_one, work), progress_every))

        rows = [row for _, row, _ in results if row is not None]
        labels_path = write_labels(rows, out_dir / LABELS_FILENAME)

        # Stats come from the written table so they match what training will read.
        train_labels = [
            label
            for _, split, label in labels_from_frame(read_labels(labels_path))
            if split == Split.TRAIN
        ]
        stats = compute_label_stats(train_labels) if train_labels else None
        if stats is None:
            logger.warning("No train examples were built; label statistics are left empty")

        completed = manifest.model_copy(update={"label_stats": stats})
        completed.save(out_dir / MANIFEST_FILENAME)
        return completed

    def _track(self, results, progress_every: int):
        for example_id, row, error in results:
            if error is not None:
                self.error_count += 1
                self.failures[example_id] = error
                logger.warning(f"Skipping example {example_id:06d}: {error}")
            else:
                self.built_count += 1
                if self.built_count % progress_every == 0:
                    logger.info(f"Built {self.built_count} examples...")
            yield example_id, row, error

    def get_stats(self) -> Dict[str, Any]:
        """
        Get build statistics.

        Returns:
            Dictionary with build metrics
        """
        return {
            "built_count": self.built_count,
            "error_count": self.error_count,
            "builder_class": self.__class__.__name__,
        }

    def log_stats(self):
        """Log build statistics."""
        logger.info(f"Dataset build complete: {self.get_stats()}")

    def reset_stats(self):
        """Reset build counters."""
        self.built_count = 0
        self.error_count = 0
        self.failures = {}


def build_dataset(
    manifest: DatasetManifest,
    out_dir: Union[str, Path],
    jobs: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> DatasetManifest:
    """Functional wrapper around DatasetBuilder.build()."""
    builder = DatasetBuilder(settings)
    completed = builder.build(manifest, out_dir, jobs)
    builder.log_stats()
    return completed
