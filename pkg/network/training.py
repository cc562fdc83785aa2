"""
Mini-batch training with early stopping on an internal monitor split
"""
import logging
from typing import List, Tuple

import numpy as np

from network.model import NetworkParams, NetworkSpec, bce_loss, gradients
from utils.errors import DataError, TrainingError

# Configure logging
logger = logging.getLogger(__name__)

MONITOR_FRAC = 0.2
PATIENCE = 10
MOMENTUM = 0.9
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class Optimizer:
    """Parameter update rule: plain SGD, heavy-ball momentum or Adam-style adaptive steps"""

    def __init__(self, kind: str, learning_rate: float, params: NetworkParams):
        self.kind = kind
        self.lr = learning_rate
        shapes = [w.shape for w in params.weights] + [b.shape for b in params.biases]
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, params: NetworkParams, grad_w: List[np.ndarray], grad_b: List[np.ndarray]) -> None:
        tensors = params.weights + params.biases
        grads = grad_w + grad_b
        self.t += 1
        for i, (p, g) in enumerate(zip(tensors, grads)):
            if self.kind == "sgd":
                p -= self.lr * g
            elif self.kind == "momentum":
                self.m[i] = MOMENTUM * self.m[i] + g
                p -= self.lr * self.m[i]
            else:
                self.m[i] = ADAM_BETA1 * self.m[i] + (1 - ADAM_BETA1) * g
                self.v[i] = ADAM_BETA2 * self.v[i] + (1 - ADAM_BETA2) * g * g
                m_hat = self.m[i] / (1 - ADAM_BETA1 ** self.t)
                v_hat = self.v[i] / (1 - ADAM_BETA2 ** self.t)
                p -= self.lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)


def monitor_split(y: np.ndarray, seed: int, frac: float = MONITOR_FRAC) -> Tuple[np.ndarray, np.ndarray]:
    """
    Stratified (fit, monitor) index split of the training rows

    Each class with at least two rows gives round(frac * count) rows (minimum 1)
    to the monitor part.
    """
    rng = np.random.default_rng(seed)
    fit_idx, monitor_idx = [], []
    for cls in (0, 1):
        members = rng.permutation(np.nonzero(y == cls)[0])
        take = max(1, int(round(frac * members.size))) if members.size >= 2 else 0
        monitor_idx.append(members[:take])
        fit_idx.append(members[take:])
    return np.sort(np.concatenate(fit_idx)), np.sort(np.concatenate(monitor_idx))


def train(spec: NetworkSpec, params: NetworkParams, X_train: np.ndarray, y_train: np.ndarray) -> NetworkParams:
    """
    Train on BCE with mini-batches; keep the parameters with the best monitor loss

    Args:
        spec: Optimizer, learning rate, batch size, epochs and seed
        params: Initial parameters (not modified)
        X_train: Training features
        y_train: Binary labels, both classes present

    Returns:
        Best-monitored NetworkParams; `log` holds one entry per epoch
    """
    X = np.asarray(X_train, dtype=float)
    y = np.asarray(y_train, dtype=float)
    if X.shape[0] != y.shape[0]:
        raise DataError("X_train and y_train differ in length")
    if y.min() == y.max():
        raise DataError("network training needs both classes present")

    fit_idx, monitor_idx = monitor_split(y, spec.seed)
    X_fit, y_fit = X[fit_idx], y[fit_idx]
    if monitor_idx.size:
        X_mon, y_mon = X[monitor_idx], y[monitor_idx]
    else:
        X_mon, y_mon = X_fit, y_fit

    current = params.copy()
    current.log = []
    optimizer = Optimizer(spec.optimizer, spec.learning_rate, current)
    rng = np.random.default_rng(spec.seed + 1)

    best = current.copy()
    best_loss = bce_loss(spec, current, X_mon, y_mon)
    initial_loss = best_loss
    stale = 0
    for epoch in range(1, spec.epochs + 1):
        order = rng.permutation(X_fit.shape[0])
        epoch_losses = []
        for start in range(0, order.size, spec.batch_size):
            batch = order[start:start + spec.batch_size]
            loss, grad_w, grad_b = gradients(spec, current, X_fit[batch], y_fit[batch])
            if not np.isfinite(loss):
                raise TrainingError("non-finite training loss", epoch)
            optimizer.step(current, grad_w, grad_b)
            epoch_losses.append(loss * batch.size)
        if not current.is_finite():
            raise TrainingError("network parameters diverged", epoch)
        train_loss = float(np.sum(epoch_losses) / order.size)
        monitor_loss = bce_loss(spec, current, X_mon, y_mon)
        if not np.isfinite(monitor_loss):
            raise TrainingError("non-finite monitor loss", epoch)
        current.log.append({"epoch": epoch, "train_loss": train_loss, "monitor_loss": monitor_loss})
        logger.debug(f"Epoch {epoch}: train {train_loss:.5f}, monitor {monitor_loss:.5f}")

        if monitor_loss < best_loss:
            best_loss = monitor_loss
            best = current.copy()
            stale = 0
        else:
            stale += 1
            if stale >= PATIENCE:
                logger.debug(f"Early stopping at epoch {epoch}")
                break

    best.log = list(current.log)
    logger.debug(f"Network trained: monitor loss {initial_loss:.5f} -> {best_loss:.5f}")
    return best
