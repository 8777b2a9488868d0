"""
Mini-batch training with MSE loss, Adam and early stopping on validation loss.
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from roomsense.config.settings import get_settings
from roomsense.errors import EmptySplit, NonFiniteLoss, ShapeMismatch
from roomsense.nn.model import Model
from roomsense.nn.optim import Adam

logger = logging.getLogger(__name__)


class TrainConfig(BaseModel):
    """Training hyper-parameters."""

    batch_size: int = Field(64, ge=1)
    learning_rate: float = Field(0.001, gt=0)
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    epsilon: float = Field(1e-8, gt=0)
    patience: int = Field(15, ge=1, description="Epochs without validation improvement before stopping")
    max_epochs: int = Field(200, ge=1)
    dropout: float = Field(0.2, ge=0, lt=1)
    seed: int = Field(0, ge=0)
    validation_fraction: float = Field(
        default_factory=lambda: get_settings().validation_fraction,
        gt=0,
        lt=1,
        description="Share of the train split held out for early stopping",
    )

    def optimizer(self) -> Adam:
        return Adam(self.learning_rate, self.beta1, self.beta2, self.epsilon)


class EpochRecord(BaseModel):
    epoch: int
    train_loss: float
    val_loss: float


class TrainResult(BaseModel):
    """Loss history and where the restored weights came from."""

    history: List[EpochRecord] = Field(default_factory=list)
    best_epoch: int = 0
    best_val_loss: float = float("inf")
    stopped_early: bool = False


def mse(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean over batch and outputs of the squared error, accumulated in float64."""
    diff = pred.astype(np.float64) - target.astype(np.float64)
    return float(np.mean(diff * diff))


def mse_grad(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    return 2.0 * (pred - target) / pred.size


def backward_and_step(model: Model, x: np.ndarray, y: np.ndarray, optimizer: Adam) -> float:
    """
    One optimization step on a batch.

    Returns:
        The loss before the update

    Raises:
        NonFiniteLoss: If the loss is NaN or infinite (parameters are left untouched)
    """
    pred = model.forward(x, training=True)
    if pred.shape != y.shape:
        raise ShapeMismatch(f"Predictions {pred.shape} vs targets {y.shape}")
    loss = mse(pred, y)
    if not np.isfinite(loss):
        raise NonFiniteLoss(f"Loss became {loss}")
    model.zero_grad()
    model.backward(mse_grad(pred, y.astype(pred.dtype)))
    optimizer.step(model.parameters(), model.gradients())
    return loss


def predict_batches(model: Model, x: np.ndarray, batch_size: int = 64) -> np.ndarray:
    """Inference-mode forward pass over `x` in batches."""
    out = [model.forward(x[s : s + batch_size]) for s in range(0, x.shape[0], batch_size)]
    return np.concatenate(out, axis=0)


class Trainer:
    """
    Epoch loop with seeded shuffling and early stopping.

    After every epoch the validation MSE is measured; the best weights (BatchNorm running
    statistics included) are restored when `patience` epochs pass without improvement or
    when max_epochs is reached.
    """

    def __init__(self, model: Model, config: Optional[TrainConfig] = None):
        self.model = model
        self.config = config or TrainConfig()
        self.optimizer = self.config.optimizer()
        self.epochs_run = 0
        self.steps_run = 0

    def _validation_loss(self, x_val: np.ndarray, y_val: np.ndarray) -> float:
        return mse(predict_batches(self.model, x_val, self.config.batch_size), y_val)

    def fit(
        self,
        x_train: np.ndarray,
        y_train: np.ndarray,
        x_val: np.ndarray,
        y_val: np.ndarray,
    ) -> TrainResult:
        """
        Train until early stopping or max_epochs and restore the best-validation weights.

        Raises:
            EmptySplit: If the train or validation set is empty
            NonFiniteLoss: If a training step produces a non-finite loss
        """
        if len(x_train) == 0:
            raise EmptySplit("Training split is empty")
        if len(x_val) == 0:
            raise EmptySplit("Validation split is empty")
        if len(x_train) != len(y_train) or len(x_val) != len(y_val):
            raise ShapeMismatch("Feature and target counts differ")

        cfg = self.config
        self.model.set_dropout(True)
        rng = np.random.default_rng(cfg.seed)
        result = TrainResult()
        best_state = self.model.state_dict()

        for epoch in range(1, cfg.max_epochs + 1):
            order = rng.permutation(len(x_train))
            losses = []
            for s in range(0, len(order), cfg.batch_size):
                idx = order[s : s + cfg.batch_size]
                losses.append(backward_and_step(self.model, x_train[idx], y_train[idx], self.optimizer))
                self.steps_run += 1
            train_loss = float(np.mean(losses))
            val_loss = float(self._validation_loss(x_val, y_val))
            self.epochs_run += 1
            result.history.append(EpochRecord(epoch=epoch, train_loss=train_loss, val_loss=val_loss))
            logger.info(f"Epoch {epoch}: train {train_loss:.4f}, val {val_loss:.4f}")

            if val_loss < result.best_val_loss:
                result.best_val_loss = val_loss
                result.best_epoch = epoch
                best_state = self.model.state_dict()
            elif epoch - result.best_epoch >= cfg.patience:
                result.stopped_early = True
                logger.info(f"No improvement for {cfg.patience} epochs; stopping at epoch {epoch}")
                break

        self.model.load_state_dict(best_state)
        logger.info(f"Restored weights from epoch {result.best_epoch} (val {result.best_val_loss:.4f})")
        return result

    def get_stats(self) -> Dict[str, Any]:
        return {
            "epochs_run": self.epochs_run,
            "steps_run": self.steps_run,
            "trainer_class": self.__class__.__name__,
        }

    def log_stats(self):
        logger.info(f"Training complete: {self.get_stats()}")

    def reset_stats(self):
        self.epochs_run = 0
        self.steps_run = 0


def train(
    model: Model,
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_val: np.ndarray,
    y_val: np.ndarray,
    config: Optional[TrainConfig] = None,
) -> TrainResult:
    """Functional wrapper around Trainer.fit()."""
    trainer = Trainer(model, config)
    result = trainer.fit(x_train, y_train, x_val, y_val)
    trainer.log_stats()
    return result
