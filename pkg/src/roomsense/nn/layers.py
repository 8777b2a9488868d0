"""
Layers of the numpy network stack.

Every layer works on channels-last batches: conv maps are (batch, time, freq, channels),
sequences are (batch, time, features), vectors are (batch, features). Shapes passed to
`build()` and returned by it exclude the batch axis.

Each layer keeps trainable arrays in `params`, their gradients in `grads` (accumulated
by `backward()`, cleared by `zero_grad()`) and non-trainable state in `buffers`.
"""

import logging
from abc import ABC, abstractmethod
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from roomsense.errors import ShapeMismatch

logger = logging.getLogger(__name__)

Shape = Tuple[int, ...]

# Upper bound on im2col elements materialized at once by Conv2D.
IM2COL_CHUNK_ELEMENTS = 1 << 24


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def he_uniform(rng: np.random.Generator, shape: Shape, fan_in: int, dtype) -> np.ndarray:
    limit = np.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


class Layer(ABC):
    """Base class for all layers."""

    kind = "layer"

    def __init__(self):
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}
        self.buffers: Dict[str, np.ndarray] = {}
        self.input_shape: Optional[Shape] = None
        self.output_shape: Optional[Shape] = None
        self.dtype = np.float32

    def build(self, input_shape: Shape, rng: np.random.Generator, dtype=np.float32) -> Shape:
        """Check the input shape, allocate parameters and return the output shape."""
        self.dtype = dtype
        self.input_shape = tuple(input_shape)
        self.output_shape = self.infer_shape(self.input_shape)
        self._init_params(rng)
        self.zero_grad()
        return self.output_shape

    @abstractmethod
    def infer_shape(self, input_shape: Shape) -> Shape:
        """Output shape for `input_shape`; raises ShapeMismatch if the input is unusable."""

    def _init_params(self, rng: np.random.Generator) -> None:
        return None

    @abstractmethod
    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        """Forward pass on one batch; caches what backward() needs when training."""

    @abstractmethod
    def backward(self, dy: np.ndarray) -> np.ndarray:
        """Gradient w.r.t. the input of the last forward(); accumulates parameter gradients."""

    def zero_grad(self) -> None:
        self.grads = {k: np.zeros_like(v) for k, v in self.params.items()}

    def astype(self, dtype) -> None:
        self.dtype = dtype
        self.params = {k: v.astype(dtype) for k, v in self.params.items()}
        self.buffers = {k: v.astype(dtype) for k, v in self.buffers.items()}
        self.zero_grad()

    @property
    def n_params(self) -> int:
        return int(sum(v.size for v in self.params.values()))

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.input_shape} -> {self.output_shape})"


def _require_rank(layer: Layer, shape: Shape, rank: int) -> None:
    if len(shape) != rank or any(d <= 0 for d in shape):
        raise ShapeMismatch(
            f"{layer.__class__.__name__} needs a {rank}-D input with positive extents, got {shape}"
        )


class Conv2D(Layer):
    """k x k convolution, stride 1, zero 'same' padding. W has shape (k, k, in, out)."""

    kind = "conv2d"

    def __init__(self, kernel: int, filters: int):
        super().__init__()
        if kernel % 2 != 1:
            raise ValueError(f"Same padding needs an odd kernel, got {kernel}")
        self.kernel = kernel
        self.filters = filters
        self._x: Optional[np.ndarray] = None

    def infer_shape(self, input_shape: Shape) -> Shape:
        _require_rank(self, input_shape, 3)
        t, f, _ = input_shape
        return (t, f, self.filters)

    def _init_params(self, rng):
        k, c = self.kernel, self.input_shape[2]
        fan_in = k * k * c
        self.params = {
            "W": he_uniform(rng, (k, k, c, self.filters), fan_in, self.dtype),
            "b": np.zeros(self.filters, dtype=self.dtype),
        }

    def _pad(self, x: np.ndarray) -> np.ndarray:
        p = self.kernel // 2
        return np.pad(x, ((0, 0), (p, p), (p, p), (0, 0)))

    def _patches(self, xp: np.ndarray) -> np.ndarray:
        # (b, T, F, C, k, k) view -> (b*T*F, k*k*C) rows ordered like W.reshape(-1, out)
        k = self.kernel
        view = sliding_window_view(xp, (k, k), axis=(1, 2))
        b, t, f, c = view.shape[:4]
        return view.transpose(0, 1, 2, 4, 5, 3).reshape(b * t * f, k * k * c)

    def _chunk(self, x: np.ndarray) -> int:
        per_example = x.shape[1] * x.shape[2] * self.kernel**2 * x.shape[3]
        return max(1, IM2COL_CHUNK_ELEMENTS // max(per_example, 1))

    def forward(self, x, training=False):
        b, t, f, _ = x.shape
        W = self.params["W"].reshape(-1, self.filters)
        out = np.empty((b, t, f, self.filters), dtype=np.result_type(x, W))
        step = self._chunk(x)
        for s in range(0, b, step):
            xp = self._pad(x[s : s + step])
            cols = self._patches(xp)
            out[s : s + step] = (cols @ W).reshape(-1, t, f, self.filters)
        out += self.params["b"]
        if training:
            self._x = x
        return out

    def backward(self, dy):
        x = self._x
        b, t, f, c = x.shape
        k, p = self.kernel, self.kernel // 2
        W = self.params["W"].reshape(-1, self.filters)
        dW = np.zeros_like(W)
        dx = np.empty_like(x)
        step = self._chunk(x)
        for s in range(0, b, step):
            xc = x[s : s + step]
            n = xc.shape[0]
            dyc = dy[s : s + step].reshape(-1, self.filters)
            dW += self._patches(self._pad(xc)).T @ dyc
            dcols = (dyc @ W.T).reshape(n, t, f, k, k, c)
            dxp = np.zeros((n, t + 2 * p, f + 2 * p, c), dtype=dx.dtype)
            for i in range(k):
                for j in range(k):
                    dxp[:, i : i + t, j : j + f, :] += dcols[:, :, :, i, j, :]
            dx[s : s + step] = dxp[:, p : p + t, p : p + f, :]
        self.grads["W"] += dW.reshape(self.params["W"].shape)
        self.grads["b"] += dy.sum(axis=(0, 1, 2))
        return dx


class BatchNorm(Layer):
    """Per-channel batch normalization over every axis but the last."""

    kind = "batchnorm"

    def __init__(self, momentum: float = 0.9, epsilon: float = 1e-5):
        super().__init__()
        self.momentum = momentum
        self.epsilon = epsilon
        self._cache = None

    def infer_shape(self, input_shape):
        if not input_shape or any(d <= 0 for d in input_shape):
            raise ShapeMismatch(f"BatchNorm got an empty shape {input_shape}")
        return input_shape

    def _init_params(self, rng):
        c = self.input_shape[-1]
        self.params = {
            "gamma": np.ones(c, dtype=self.dtype),
            "beta": np.zeros(c, dtype=self.dtype),
        }
        self.buffers = {
            "running_mean": np.zeros(c, dtype=self.dtype),
            "running_var": np.ones(c, dtype=self.dtype),
        }

    def forward(self, x, training=False):
        axes = tuple(range(x.ndim - 1))
        if training:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            m = self.momentum
            self.buffers["running_mean"] = (
                m * self.buffers["running_mean"] + (1.0 - m) * mean
            ).astype(self.dtype)
            self.buffers["running_var"] = (
                m * self.buffers["running_var"] + (1.0 - m) * var
            ).astype(self.dtype)
        else:
            mean, var = self.buffers["running_mean"], self.buffers["running_var"]
        inv_std = 1.0 / np.sqrt(var + self.epsilon)
        x_hat = (x - mean) * inv_std
        if training:
            self._cache = (x_hat, inv_std)
        return (self.params["gamma"] * x_hat + self.params["beta"]).astype(x.dtype)

    def backward(self, dy):
        x_hat, inv_std = self._cache
        c = dy.shape[-1]
        dy2 = dy.reshape(-1, c)
        xh2 = x_hat.reshape(-1, c)
        n = dy2.shape[0]
        self.grads["beta"] += dy2.sum(axis=0)
        self.grads["gamma"] += (dy2 * xh2).sum(axis=0)
        dxh = dy2 * self.params["gamma"]
        dx = (n * dxh - dxh.sum(axis=0) - xh2 * (dxh * xh2).sum(axis=0)) * (inv_std / n)
        return dx.reshape(dy.shape)


class Activation(Layer):
    """Element-wise ReLU or ELU (alpha = 1)."""

    kind = "activation"
    FUNCTIONS = ("relu", "elu")

    def __init__(self, function: str):
        super().__init__()
        if function not in self.FUNCTIONS:
            raise ValueError(f"Unknown activation '{function}'. Valid: {self.FUNCTIONS}")
        self.function = function
        self._x = None
        self._y = None

    def infer_shape(self, input_shape):
        return input_shape

    def forward(self, x, training=False):
        if self.function == "relu":
            y = np.maximum(x, 0)
        else:
            y = np.where(x > 0, x, np.expm1(np.minimum(x, 0)))
        if training:
            self._x, self._y = x, y
        return y

    def backward(self, dy):
        if self.function == "relu":
            return dy * (self._x > 0)
        return dy * np.where(self._x > 0, 1.0, self._y + 1.0).astype(dy.dtype)


class MaxPool2D(Layer):
    """Non-overlapping 2x2 max pooling over (time, freq); odd trailing rows/columns are dropped."""

    kind = "maxpool"

    def __init__(self):
        super().__init__()
        self._cache = None

    def infer_shape(self, input_shape):
        _require_rank(self, input_shape, 3)
        t, f, c = input_shape
        if t < 2 or f < 2:
            raise ShapeMismatch(f"MaxPool2D needs at least 2x2 maps, got {input_shape}")
        return (t // 2, f // 2, c)

    def _blocks(self, x):
        b, t, f, c = x.shape
        t2, f2 = t // 2, f // 2
        blocks = x[:, : 2 * t2, : 2 * f2, :].reshape(b, t2, 2, f2, 2, c)
        return blocks.transpose(0, 1, 3, 5, 2, 4).reshape(b, t2, f2, c, 4)

    def forward(self, x, training=False):
        blocks = self._blocks(x)
        idx = np.argmax(blocks, axis=-1)[..., None]
        out = np.take_along_axis(blocks, idx, axis=-1)[..., 0]
        if training:
            self._cache = (x.shape, idx)
        return out

    def backward(self, dy):
        shape, idx = self._cache
        b, t, f, c = shape
        t2, f2 = t // 2, f // 2
        routed = np.zeros((b, t2, f2, c, 4), dtype=dy.dtype)
        np.put_along_axis(routed, idx, dy[..., None], axis=-1)
        routed = routed.reshape(b, t2, f2, c, 2, 2).transpose(0, 1, 4, 2, 5, 3)
        dx = np.zeros(shape, dtype=dy.dtype)
        dx[:, : 2 * t2, : 2 * f2, :] = routed.reshape(b, 2 * t2, 2 * f2, c)
        return dx


class Dropout(Layer):
    """Inverted dropout; identity at inference or when disabled."""

    kind = "dropout"

    def __init__(self, p: float):
        super().__init__()
        if not 0.0 <= p < 1.0:
            raise ValueError(f"Dropout probability must be in [0, 1), got {p}")
        self.p = p
        self.enabled = True
        self._rng: Optional[np.random.Generator] = None
        self._mask = None

    def infer_shape(self, input_shape):
        return input_shape

    def _init_params(self, rng):
        self._rng = np.random.default_rng(rng.integers(0, 2**63))

    def forward(self, x, training=False):
        if not training or not self.enabled or self.p == 0.0:
            self._mask = None
            return x
        keep = 1.0 - self.p
        self._mask = ((self._rng.random(x.shape) < keep) / keep).astype(x.dtype)
        return x * self._mask

    def backward(self, dy):
        return dy if self._mask is None else dy * self._mask


class TimeFlatten(Layer):
    """(time, freq, channels) -> (time, freq * channels): one feature vector per frame."""

    kind = "time_flatten"

    def infer_shape(self, input_shape):
        _require_rank(self, input_shape, 3)
        t, f, c = input_shape
        return (t, f * c)

    def forward(self, x, training=False):
        self._shape = x.shape
        return x.reshape(x.shape[0], x.shape[1], -1)

    def backward(self, dy):
        return dy.reshape(self._shape)


class GlobalFlatten(Layer):
    """Average over time and frequency: (time, freq, channels) -> (channels,)."""

    kind = "global_flatten"

    def infer_shape(self, input_shape):
        _require_rank(self, input_shape, 3)
        return (input_shape[2],)

    def forward(self, x, training=False):
        self._shape = x.shape
        return x.mean(axis=(1, 2))

    def backward(self, dy):
        b, t, f, c = self._shape
        return np.broadcast_to(dy[:, None, None, :] / (t * f), self._shape).astype(dy.dtype)


class GRU(Layer):
    """
    Gated recurrent unit over the time axis, zero initial state.

    Gates are stacked [z, r, n] along the last axis of Wx (in, 3U), Wh (U, 3U) and b (3U):

        z = sigmoid(x Wz + h Uz + bz)
        r = sigmoid(x Wr + h Ur + br)
        n = tanh(x Wn + (r * h) Un + bn)
        h' = z * h + (1 - z) * n
    """

    kind = "gru"

    def __init__(self, units: int, return_sequences: bool = False):
        super().__init__()
        self.units = units
        self.return_sequences = return_sequences
        self._cache = None

    def infer_shape(self, input_shape):
        _require_rank(self, input_shape, 2)
        t, _ = input_shape
        return (t, self.units) if self.return_sequences else (self.units,)

    def _init_params(self, rng):
        d, u = self.input_shape[1], self.units
        limit = 1.0 / np.sqrt(u)
        self.params = {
            "Wx": rng.uniform(-limit, limit, size=(d, 3 * u)).astype(self.dtype),
            "Wh": rng.uniform(-limit, limit, size=(u, 3 * u)).astype(self.dtype),
            "b": np.zeros(3 * u, dtype=self.dtype),
        }

    def forward(self, x, training=False):
        b, t, _ = x.shape
        u = self.units
        Wx, Wh, bias = self.params["Wx"], self.params["Wh"], self.params["b"]
        xw = x @ Wx + bias
        h = np.zeros((b, u), dtype=xw.dtype)
        hs = np.empty((b, t, u), dtype=xw.dtype)
        steps = []
        for i in range(t):
            hw = h @ Wh[:, : 2 * u]
            z = _sigmoid(xw[:, i, :u] + hw[:, :u])
            r = _sigmoid(xw[:, i, u : 2 * u] + hw[:, u:])
            rh = r * h
            n = np.tanh(xw[:, i, 2 * u :] + rh @ Wh[:, 2 * u :])
            if training:
                steps.append((h, z, r, rh, n))
            h = z * h + (1.0 - z) * n
            hs[:, i] = h
        if training:
            self._cache = (x, steps)
        return hs if self.return_sequences else h

    def backward(self, dy):
        x, steps = self._cache
        b, t, _ = x.shape
        u = self.units
        Wx, Wh = self.params["Wx"], self.params["Wh"]
        dxw = np.empty((b, t, 3 * u), dtype=dy.dtype)
        dWh = np.zeros_like(Wh)
        dh = np.zeros((b, u), dtype=dy.dtype)
        if not self.return_sequences:
            dh = dy.copy()

        for i in range(t - 1, -1, -1):
            if self.return_sequences:
                dh = dh + dy[:, i]
            h_prev, z, r, rh, n = steps[i]
            dz = dh * (h_prev - n)
            dn = dh * (1.0 - z)
            dh_prev = dh * z

            dan = dn * (1.0 - n * n)
            dWh[:, 2 * u :] += rh.T @ dan
            drh = dan @ Wh[:, 2 * u :].T
            dr = drh * h_prev
            dh_prev += drh * r

            daz = dz * z * (1.0 - z)
            dar = dr * r * (1.0 - r)
            dzr = np.concatenate([daz, dar], axis=1)
            dWh[:, : 2 * u] += h_prev.T @ dzr
            dh_prev += dzr @ Wh[:, : 2 * u].T

            dxw[:, i, : 2 * u] = dzr
            dxw[:, i, 2 * u :] = dan
            dh = dh_prev

        flat = dxw.reshape(b * t, 3 * u)
        self.grads["Wx"] += x.reshape(b * t, -1).T @ flat
        self.grads["Wh"] += dWh
        self.grads["b"] += flat.sum(axis=0)
        return (flat @ Wx.T).reshape(x.shape)


class Dense(Layer):
    """Fully connected layer on (batch, features) inputs; linear output."""

    kind = "dense"

    def __init__(self, units: int):
        super().__init__()
        self.units = units
        self._x = None

    def infer_shape(self, input_shape):
        _require_rank(self, input_shape, 1)
        return (self.units,)

    def _init_params(self, rng):
        d = self.input_shape[0]
        self.params = {
            "W": he_uniform(rng, (d, self.units), d, self.dtype),
            "b": np.zeros(self.units, dtype=self.dtype),
        }

    def forward(self, x, training=False):
        if training:
            self._x = x
        return x @ self.params["W"] + self.params["b"]

    def backward(self, dy):
        self.grads["W"] += self._x.T @ dy
        self.grads["b"] += dy.sum(axis=0)
        return dy @ self.params["W"].T
