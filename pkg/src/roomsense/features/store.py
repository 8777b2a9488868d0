"""
RSFT feature files and directory featurization.

Layout (little-endian):

    4s   magic b"RSFT"
    H    version
    I    rows
    I    cols
    16s  config fingerprint
    rows*cols float32, row-major
"""

import json
import logging
import struct
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from roomsense.dsp.signal import load_wav, resample
from roomsense.errors import CorruptHeader, RoomSenseError, UnsupportedFormat
from roomsense.features.mfcc import FINGERPRINT_BYTES, FeatureMatrix, MfccConfig, compute_mfcc

logger = logging.getLogger(__name__)

FEATURE_MAGIC = b"RSFT"
FEATURE_VERSION = 1
FEATURE_SUFFIX = ".rsft"
FEATURE_CONFIG_FILENAME = "features.json"

_HEADER = struct.Struct(f"<4sHII{FINGERPRINT_BYTES}s")


def write_features(f: FeatureMatrix, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows, cols = f.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FEATURE_MAGIC, FEATURE_VERSION, rows, cols, f.fingerprint))
        fh.write(f.values.astype("<f4").tobytes(order="C"))
    return path


def read_features(path: Union[str, Path]) -> FeatureMatrix:
    """
    Load an RSFT file.

    Raises:
        FileNotFoundError: If the file does not exist
        UnsupportedFormat: If the magic or version is wrong
        CorruptHeader: If the payload size does not match the header
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise CorruptHeader(f"{path} is too short for an RSFT header")

    magic, version, rows, cols, fingerprint = _HEADER.unpack_from(raw)
    if magic != FEATURE_MAGIC:
        raise UnsupportedFormat(f"{path} is not an RSFT file")
    if version != FEATURE_VERSION:
        raise UnsupportedFormat(f"{path}: RSFT version {version} is not supported")

    payload = raw[_HEADER.size :]
    if len(payload) != rows * cols * 4:
        raise CorruptHeader(f"{path}: header says {rows}x{cols}, payload holds {len(payload)} bytes")
    values = np.frombuffer(payload, dtype="<f4").reshape(rows, cols)
    return FeatureMatrix(values.astype(np.float32), fingerprint)


def load_config(path: Optional[Union[str, Path]]) -> MfccConfig:
    """MfccConfig from a JSON file, or the defaults when no path is given."""
    if path is None:
        return MfccConfig()
    return MfccConfig.model_validate_json(Path(path).read_text(encoding="utf-8"))


def _featurize_one(job: Tuple[str, str, MfccConfig]) -> Tuple[str, Optional[str]]:
    wav_path, out_path, cfg = job
    try:
        s = load_wav(wav_path)
        if s.sample_rate != cfg.sample_rate:
            s = resample(s, cfg.sample_rate)
        write_features(compute_mfcc(s, cfg), out_path)
        return wav_path, None
    except (RoomSenseError, FileNotFoundError) as e:
        return wav_path, f"{type(e).__name__}: {e}"


def featurize_directory(
    in_dir: Union[str, Path],
    out_dir: Union[str, Path],
    cfg: Optional[MfccConfig] = None,
    jobs: int = 1,
) -> Dict[str, int]:
    """
    Write one `<stem>.rsft` per WAV found under `in_dir` (or its `wav/` folder).

    The config and its fingerprint are written next to the features as features.json.

    Returns:
        Counts of written and failed files
    """
    cfg = cfg or MfccConfig()
    in_dir, out_dir = Path(in_dir), Path(out_dir)
    source = in_dir / "wav" if (in_dir / "wav").is_dir() else in_dir
    wavs = sorted(source.glob("*.wav"))
    if not wavs:
        raise FileNotFoundError(f"No WAV files in {source}")

    out_dir.mkdir(parents=True, exist_ok=True)
    work = [(str(w), str(out_dir / f"{w.stem}{FEATURE_SUFFIX}"), cfg) for w in wavs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_featurize_one, work, chunksize=8))
    else:
        results = [_featurize_one(job) for job in work]

    failed = 0
    for wav_path, error in results:
        if error is not None:
            failed += 1
            logger.warning(f"Skipping {wav_path}: {error}")

    meta = {"config": cfg.model_dump(), "fingerprint": cfg.fingerprint().hex()}
    (out_dir / FEATURE_CONFIG_FILENAME).write_text(json.dumps(meta, indent=2), encoding="utf-8")
    logger.info(f"Featurized {len(wavs) - failed}/{len(wavs)} files into {out_dir}")
    return {"written": len(wavs) - failed, "failed": failed}


def load_feature_set(
    feature_dir: Union[str, Path], ids: List[int]
) -> Tuple[List[int], List[FeatureMatrix]]:
    """Load `<id:06d>.rsft` for each id; ids without a feature file are skipped with a warning."""
    feature_dir = Path(feature_dir)
    found, matrices = [], []
    for example_id in ids:
        path = feature_dir / f"{example_id:06d}{FEATURE_SUFFIX}"
        if not path.exists():
            logger.warning(f"No features for example {example_id:06d}; skipped")
            continue
        found.append(example_id)
        matrices.append(read_features(path))
    return found, matrices
