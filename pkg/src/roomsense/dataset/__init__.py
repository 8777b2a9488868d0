"""
Dataset synthesis: source splits, manifests, labeled example generation.
"""

from roomsense.dataset.builder import (
    LABEL_COLUMNS,
    DatasetBuilder,
    build_dataset,
    compute_label_stats,
    labels_from_frame,
    read_labels,
    write_labels,
)
from roomsense.dataset.manifest_gen import generate_manifest
from roomsense.dataset.splits import list_wavs, make_splits, split_of
from roomsense.dataset.synthesis import (
    SynthesisParams,
    SynthesizedExample,
    count_chunks,
    derive_seed,
    synthesize_example,
)

__all__ = [
    "LABEL_COLUMNS",
    "DatasetBuilder",
    "SynthesisParams",
    "SynthesizedExample",
    "build_dataset",
    "compute_label_stats",
    "count_chunks",
    "derive_seed",
    "generate_manifest",
    "labels_from_frame",
    "list_wavs",
    "make_splits",
    "read_labels",
    "split_of",
    "synthesize_example",
    "write_labels",
]
