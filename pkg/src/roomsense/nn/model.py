"""
Model specifications and the sequential network built from them.
"""

import hashlib
import logging
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from roomsense.errors import ShapeMismatch
from roomsense.models.labels import TARGET_NAMES
from roomsense.nn.layers import (
    GRU,
    Activation,
    BatchNorm,
    Conv2D,
    Dense,
    Dropout,
    GlobalFlatten,
    Layer,
    MaxPool2D,
    TimeFlatten,
)

logger = logging.getLogger(__name__)

MODEL_NAMES = ("baseline_cnn", "crnn")
DEFAULT_INPUT_SHAPE = (798, 32, 1)
N_OUTPUTS = len(TARGET_NAMES)

LayerKind = Literal[
    "conv2d",
    "batchnorm",
    "activation",
    "maxpool",
    "dropout",
    "gru",
    "dense",
    "time_flatten",
    "global_flatten",
]


class LayerSpec(BaseModel):
    """One layer of a ModelSpec; only the fields of its kind are used."""

    kind: LayerKind
    kernel: Optional[int] = Field(None, gt=0)
    filters: Optional[int] = Field(None, gt=0)
    units: Optional[int] = Field(None, gt=0)
    function: Optional[str] = None
    p: Optional[float] = Field(None, ge=0, lt=1)
    return_sequences: bool = False

    def create(self) -> Layer:
        if self.kind == "conv2d":
            return Conv2D(self.kernel, self.filters)
        if self.kind == "batchnorm":
            return BatchNorm()
        if self.kind == "activation":
            return Activation(self.function)
        if self.kind == "maxpool":
            return MaxPool2D()
        if self.kind == "dropout":
            return Dropout(self.p)
        if self.kind == "gru":
            return GRU(self.units, self.return_sequences)
        if self.kind == "dense":
            return Dense(self.units)
        if self.kind == "time_flatten":
            return TimeFlatten()
        return GlobalFlatten()


class ModelSpec(BaseModel):
    """Ordered layer list plus the per-example input shape (time, freq, channels)."""

    name: str
    input_shape: Tuple[int, int, int] = DEFAULT_INPUT_SHAPE
    layers: List[LayerSpec]

    def fingerprint(self) -> bytes:
        """16-byte digest of the architecture."""
        canonical = self.model_dump_json(exclude={"name"})
        return hashlib.sha256(canonical.encode("utf-8")).digest()[:16]


# Layer-spec shorthands
def C(kernel: int, filters: int) -> LayerSpec:
    return LayerSpec(kind="conv2d", kernel=kernel, filters=filters)


def D(units: int) -> LayerSpec:
    return LayerSpec(kind="dense", units=units)


def G(units: int, return_sequences: bool = False) -> LayerSpec:
    return LayerSpec(kind="gru", units=units, return_sequences=return_sequences)


def act(function: str) -> LayerSpec:
    return LayerSpec(kind="activation", function=function)


def conv_block(kernel: int, filters: int, function: str, dropout: float) -> List[LayerSpec]:
    """Conv -> BatchNorm -> activation -> 2x2 MaxPool -> Dropout."""
    return [
        C(kernel, filters),
        LayerSpec(kind="batchnorm"),
        act(function),
        LayerSpec(kind="maxpool"),
        LayerSpec(kind="dropout", p=dropout),
    ]


def build_model(
    name: str,
    input_shape: Tuple[int, int, int] = DEFAULT_INPUT_SHAPE,
    dropout: float = 0.2,
    outputs: int = N_OUTPUTS,
) -> ModelSpec:
    """
    Architecture spec of the baseline CNN or the CRNN.

    baseline_cnn: two 5x5/256 ReLU conv blocks, global average, D(64), linear D(out).
    crnn: 3x3 ELU conv blocks of 64/128/128/128 filters, per-frame flatten, two GRU(32)
    layers (the first returning its sequence), D(128), D(64), linear D(out).
    """
    if name == "baseline_cnn":
        layers = [
            *conv_block(5, 256, "relu", dropout),
            *conv_block(5, 256, "relu", dropout),
            LayerSpec(kind="global_flatten"),
            D(64),
            act("relu"),
            D(outputs),
        ]
    elif name == "crnn":
        layers = [
            *conv_block(3, 64, "elu", dropout),
            *conv_block(3, 128, "elu", dropout),
            *conv_block(3, 128, "elu", dropout),
            *conv_block(3, 128, "elu", dropout),
            LayerSpec(kind="time_flatten"),
            G(32, return_sequences=True),
            G(32),
            D(128),
            act("elu"),
            D(64),
            act("elu"),
            D(outputs),
        ]
    else:
        raise ValueError(f"Unknown model '{name}'. Valid: {MODEL_NAMES}")
    return ModelSpec(name=name, input_shape=input_shape, layers=layers)


class Model:
    """
    Sequential network instantiated from a ModelSpec.

    Shapes are chain-checked when the model is built, before any data flows.
    Parameters are addressed as "<index>.<param>", e.g. "00.W".
    """

    def __init__(self, spec: ModelSpec, seed: int = 0, dtype=np.float32):
        self.spec = spec
        self.seed = seed
        self.dtype = dtype
        self.layers: List[Layer] = [layer_spec.create() for layer_spec in spec.layers]
        rng = np.random.default_rng(seed)
        shape = tuple(spec.input_shape)
        for i, layer in enumerate(self.layers):
            try:
                shape = layer.build(shape, rng, dtype)
            except ShapeMismatch as e:
                raise ShapeMismatch(f"Layer {i} ({layer.kind}): {e}") from e
        self.output_shape = shape
        logger.debug(f"Built {spec.name} with {self.count_parameters()} trainable parameters")

    def check_input(self, shape: Tuple[int, ...]) -> None:
        """Validate a batch shape (batch, time, freq, channels); time may differ from the spec."""
        expected = tuple(self.spec.input_shape)
        if len(shape) != 4 or tuple(shape[2:]) != expected[1:]:
            raise ShapeMismatch(f"Expected a batch of (*, *, {expected[1]}, {expected[2]}), got {shape}")
        current = tuple(shape[1:])
        for i, layer in enumerate(self.layers):
            try:
                current = layer.infer_shape(current)
            except ShapeMismatch as e:
                raise ShapeMismatch(f"Input {shape} fails at layer {i}: {e}") from e

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self.check_input(x.shape)
        out = np.asarray(x, dtype=self.dtype)
        for layer in self.layers:
            out = layer.forward(out, training)
        return out

    def backward(self, dy: np.ndarray) -> np.ndarray:
        grad = dy.astype(self.dtype)
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def zero_grad(self) -> None:
        for layer in self.layers:
            layer.zero_grad()

    def parameters(self) -> Dict[str, np.ndarray]:
        return {f"{i:02d}.{k}": v for i, layer in enumerate(self.layers) for k, v in layer.params.items()}

    def gradients(self) -> Dict[str, np.ndarray]:
        return {f"{i:02d}.{k}": v for i, layer in enumerate(self.layers) for k, v in layer.grads.items()}

    def set_parameter(self, key: str, value: np.ndarray) -> None:
        index, name = key.split(".", 1)
        layer = self.layers[int(index)]
        target = layer.params if name in layer.params else layer.buffers
        if name not in target:
            raise KeyError(f"Unknown parameter '{key}'")
        if target[name].shape != value.shape:
            raise ShapeMismatch(f"{key}: expected {target[name].shape}, got {value.shape}")
        target[name] = value.astype(self.dtype)

    def state_dict(self) -> Dict[str, np.ndarray]:
        """Copies of every parameter and buffer (BatchNorm running statistics included)."""
        state = {}
        for i, layer in enumerate(self.layers):
            for k, v in {**layer.params, **layer.buffers}.items():
                state[f"{i:02d}.{k}"] = v.copy()
        return state

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        expected = set(self.state_dict())
        if set(state) != expected:
            missing, extra = expected - set(state), set(state) - expected
            raise ShapeMismatch(f"State mismatch: missing {sorted(missing)}, unexpected {sorted(extra)}")
        for key, value in state.items():
            self.set_parameter(key, np.asarray(value))

    def astype(self, dtype) -> "Model":
        self.dtype = dtype
        for layer in self.layers:
            layer.astype(dtype)
        return self

    def set_dropout(self, enabled: bool) -> None:
        for layer in self.layers:
            if isinstance(layer, Dropout):
                layer.enabled = enabled

    def count_parameters(self) -> int:
        """Number of trainable scalars (running statistics excluded)."""
        return sum(layer.n_params for layer in self.layers)

    def summary(self) -> str:
        lines = [f"{self.spec.name}: input {tuple(self.spec.input_shape)}"]
        for i, layer in enumerate(self.layers):
            lines.append(f"  {i:02d} {layer.kind:<15} {str(layer.output_shape):<18} {layer.n_params}")
        lines.append(f"  trainable parameters: {self.count_parameters()}")
        return "\n".join(lines)


def count_parameters(spec: ModelSpec) -> int:
    """Trainable parameter count of a spec."""
    return Model(spec).count_parameters()
