"""
Finite-difference verification of the backward pass.
"""

import logging
from typing import Dict, Optional

import numpy as np

from roomsense.nn.model import C, D, G, LayerSpec, Model, ModelSpec, act
from roomsense.nn.training import mse, mse_grad

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-5


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / max(||a|| + ||n||, 1e-8) over a whole tensor."""
    diff = np.linalg.norm(np.ravel(analytic) - np.ravel(numeric))
    scale = np.linalg.norm(np.ravel(analytic)) + np.linalg.norm(np.ravel(numeric))
    return float(diff / max(scale, 1e-8))


def gradient_check(
    model: Model,
    x: np.ndarray,
    y: np.ndarray,
    eps: float = 1e-5,
    max_checks_per_tensor: Optional[int] = None,
    seed: int = 0,
) -> Dict[str, float]:
    """
    Compare reverse-mode parameter gradients with central differences of the MSE loss.

    The model is switched to float64 and dropout is disabled for the check; BatchNorm
    runs on batch statistics. Large tensors can be sub-sampled with `max_checks_per_tensor`.

    Returns:
        Norm-wise relative error per parameter name, plus "max" over all of them
    """
    model.astype(np.float64)
    model.set_dropout(False)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    rng = np.random.default_rng(seed)

    def loss() -> float:
        return mse(model.forward(x, training=True), y)

    try:
        pred = model.forward(x, training=True)
        model.zero_grad()
        model.backward(mse_grad(pred, y))
        analytic = {k: v.copy() for k, v in model.gradients().items()}

        errors: Dict[str, float] = {}
        for key, param in model.parameters().items():
            flat = param.reshape(-1)
            indices = np.arange(flat.size)
            if max_checks_per_tensor is not None and flat.size > max_checks_per_tensor:
                indices = rng.choice(flat.size, size=max_checks_per_tensor, replace=False)
            numeric = np.empty(indices.size)
            for j, i in enumerate(indices):
                original = flat[i]
                flat[i] = original + eps
                up = loss()
                flat[i] = original - eps
                down = loss()
                flat[i] = original
                numeric[j] = (up - down) / (2.0 * eps)
            errors[key] = relative_error(analytic[key].reshape(-1)[indices], numeric)
            logger.debug(f"{key}: relative error {errors[key]:.2e}")
    finally:
        model.set_dropout(True)

    errors["max"] = max(errors.values()) if errors else 0.0
    return errors


def small_spec(name: str = "crnn", input_shape=(8, 6, 1)) -> ModelSpec:
    """
    Scaled-down version of a named architecture, cheap enough to check every weight.

    BatchNorm sits on the input: a biased layer feeding BatchNorm has a gradient that is
    zero in exact arithmetic, which finite differences can only resolve as noise.
    """
    if name == "crnn":
        layers = [
            LayerSpec(kind="batchnorm"),
            C(3, 4),
            act("elu"),
            LayerSpec(kind="maxpool"),
            LayerSpec(kind="time_flatten"),
            G(5, return_sequences=True),
            G(4),
            D(8),
            act("elu"),
            D(6),
        ]
    elif name == "baseline_cnn":
        layers = [
            LayerSpec(kind="batchnorm"),
            C(3, 4),
            act("elu"),
            LayerSpec(kind="maxpool"),
            LayerSpec(kind="global_flatten"),
            D(8),
            act("elu"),
            D(6),
        ]
    else:
        raise ValueError(f"Unknown model '{name}'")
    return ModelSpec(name=f"{name}_small", input_shape=input_shape, layers=layers)
