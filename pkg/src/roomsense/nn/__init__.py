"""Numpy CNN/CRNN stack: layers, models, training and inference."""

from roomsense.nn.fitting import fit_on_dataset
from roomsense.nn.gradcheck import gradient_check, relative_error, small_spec
from roomsense.nn.inference import Estimator, destandardize, predict, predict_many
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
from roomsense.nn.model import MODEL_NAMES, LayerSpec, Model, ModelSpec, build_model, count_parameters
from roomsense.nn.optim import Adam
from roomsense.nn.training import (
    EpochRecord,
    TrainConfig,
    Trainer,
    TrainResult,
    backward_and_step,
    mse,
    train,
)
from roomsense.nn.weights import WeightStore

__all__ = [
    "GRU",
    "MODEL_NAMES",
    "Activation",
    "Adam",
    "BatchNorm",
    "Conv2D",
    "Dense",
    "Dropout",
    "EpochRecord",
    "Estimator",
    "GlobalFlatten",
    "Layer",
    "LayerSpec",
    "MaxPool2D",
    "Model",
    "ModelSpec",
    "TimeFlatten",
    "TrainConfig",
    "TrainResult",
    "Trainer",
    "WeightStore",
    "backward_and_step",
    "build_model",
    "count_parameters",
    "destandardize",
    "fit_on_dataset",
    "gradient_check",
    "mse",
    "predict",
    "predict_many",
    "relative_error",
    "small_spec",
    "train",
]
