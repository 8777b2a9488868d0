"""
RSWT weight store: trained parameters plus everything needed to use them.

Layout (little-endian):

    4s   magic b"RSWT"
    H    version
    I    metadata length, then UTF-8 JSON metadata
    I    tensor count
    per tensor:
        H    name length, then UTF-8 name
        B    ndim
        I*   extents
        float32 data, row-major
"""

import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from roomsense.errors import CorruptHeader, UnsupportedFormat
from roomsense.features.mfcc import FeatureStats
from roomsense.models.manifest import LabelStats
from roomsense.nn.model import Model, ModelSpec

logger = logging.getLogger(__name__)

WEIGHTS_MAGIC = b"RSWT"
WEIGHTS_VERSION = 1


@dataclass
class WeightStore:
    """A trained model's spec, weights, and the standardization it was trained under."""

    spec: ModelSpec
    state: Dict[str, np.ndarray]
    target_stats: LabelStats
    feature_stats: FeatureStats
    feature_fingerprint: bytes
    extra: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_model(
        cls,
        model: Model,
        target_stats: LabelStats,
        feature_stats: FeatureStats,
        feature_fingerprint: bytes,
        extra: Optional[Dict[str, Any]] = None,
    ) -> "WeightStore":
        state = {k: v.astype(np.float32) for k, v in model.state_dict().items()}
        return cls(model.spec, state, target_stats, feature_stats, feature_fingerprint, extra or {})

    def build(self) -> Model:
        """Instantiate the model and load the stored weights."""
        model = Model(self.spec)
        model.load_state_dict(self.state)
        return model

    def metadata(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.model_dump(),
            "model_fingerprint": self.spec.fingerprint().hex(),
            "target_stats": self.target_stats.model_dump(),
            "feature_stats": self.feature_stats.to_dict(),
            "feature_fingerprint": self.feature_fingerprint.hex(),
            "extra": self.extra,
        }

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        meta = json.dumps(self.metadata(), sort_keys=True).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(struct.pack("<4sHI", WEIGHTS_MAGIC, WEIGHTS_VERSION, len(meta)))
            fh.write(meta)
            fh.write(struct.pack("<I", len(self.state)))
            for name in sorted(self.state):
                tensor = np.ascontiguousarray(self.state[name], dtype="<f4")
                encoded = name.encode("utf-8")
                fh.write(struct.pack("<H", len(encoded)))
                fh.write(encoded)
                fh.write(struct.pack("<B", tensor.ndim))
                fh.write(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
                fh.write(tensor.tobytes(order="C"))
        logger.info(f"Saved {len(self.state)} tensors to {path}")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "WeightStore":
        """
        Read an RSWT file.

        Raises:
            FileNotFoundError: If the file does not exist
            UnsupportedFormat: If the magic or version is wrong
            CorruptHeader: If the file is truncated or its metadata is malformed
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"File not found: {path}")
        raw = path.read_bytes()
        reader = _Reader(raw, path)

        magic, version, meta_len = reader.unpack("<4sHI")
        if magic != WEIGHTS_MAGIC:
            raise UnsupportedFormat(f"{path} is not an RSWT file")
        if version != WEIGHTS_VERSION:
            raise UnsupportedFormat(f"{path}: RSWT version {version} is not supported")
        try:
            meta = json.loads(reader.take(meta_len).decode("utf-8"))
        except ValueError as e:
            raise CorruptHeader(f"{path}: unreadable metadata: {e}") from e

        (n_tensors,) = reader.unpack("<I")
        state = {}
        for _ in range(n_tensors):
            (name_len,) = reader.unpack("<H")
            name = reader.take(name_len).decode("utf-8")
            (ndim,) = reader.unpack("<B")
            shape = reader.unpack(f"<{ndim}I") if ndim else ()
            count = int(np.prod(shape)) if ndim else 1
            data = np.frombuffer(reader.take(4 * count), dtype="<f4").astype(np.float32)
            state[name] = data.reshape(shape)

        spec = ModelSpec.model_validate(meta["spec"])
        if spec.fingerprint().hex() != meta["model_fingerprint"]:
            raise CorruptHeader(f"{path}: model fingerprint does not match the stored spec")
        return cls(
            spec=spec,
            state=state,
            target_stats=LabelStats.model_validate(meta["target_stats"]),
            feature_stats=FeatureStats.from_dict(meta["feature_stats"]),
            feature_fingerprint=bytes.fromhex(meta["feature_fingerprint"]),
            extra=meta.get("extra", {}),
        )


class _Reader:
    def __init__(self, raw: bytes, path: Path):
        self.raw = raw
        self.path = path
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.raw):
            raise CorruptHeader(f"{self.path} is truncated")
        chunk = self.raw[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))
