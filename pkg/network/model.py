"""
Dense feedforward binary classifier
Network spec, parameters, importance-weighted initialization, forward and backward passes
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from utils.errors import ConfigError, DataError

# Configure logging
logger = logging.getLogger(__name__)

ACTIVATIONS = ("relu", "tanh", "sigmoid")
OPTIMIZERS = ("sgd", "momentum", "adaptive")
LOGIT_CLAMP = 30.0


@dataclass(frozen=True)
class NetworkSpec:
    layer_sizes: Tuple[int, ...]
    activations: Tuple[str, ...]
    optimizer: str = "adaptive"
    learning_rate: float = 0.01
    batch_size: int = 32
    epochs: int = 50
    seed: int = 42

    def __post_init__(self):
        if len(self.layer_sizes) < 3:
            raise ConfigError("a network needs an input layer, at least one hidden layer and an output layer")
        if self.layer_sizes[-1] != 1:
            raise ConfigError("output layer must have size 1")
        if any(size < 1 for size in self.layer_sizes):
            raise ConfigError(f"layer sizes must be positive: {self.layer_sizes}")
        if len(self.activations) != len(self.layer_sizes) - 2:
            raise ConfigError("one activation per hidden layer is required")
        bad = [a for a in self.activations if a not in ACTIVATIONS]
        if bad:
            raise ConfigError(f"unknown activations {bad}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"unknown optimizer {self.optimizer}")
        if self.learning_rate <= 0 or self.batch_size < 1 or self.epochs < 1:
            raise ConfigError(f"invalid training parameters in {self}")

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes) - 1

    def with_input_size(self, d: int) -> "NetworkSpec":
        return NetworkSpec((d,) + tuple(self.layer_sizes[1:]), self.activations, self.optimizer,
                           self.learning_rate, self.batch_size, self.epochs, self.seed)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["layer_sizes"] = list(self.layer_sizes)
        data["activations"] = list(self.activations)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NetworkSpec":
        data = dict(data)
        data["layer_sizes"] = tuple(data["layer_sizes"])
        data["activations"] = tuple(data["activations"])
        return cls(**data)


@dataclass
class NetworkParams:
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    log: List[Dict[str, float]] = field(default_factory=list)

    def copy(self) -> "NetworkParams":
        return NetworkParams([w.copy() for w in self.weights], [b.copy() for b in self.biases], list(self.log))

    def is_finite(self) -> bool:
        return all(np.isfinite(w).all() for w in self.weights) and all(np.isfinite(b).all() for b in self.biases)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "layers": [
                {"shape": list(w.shape), "weights": w.ravel().tolist(), "bias": b.tolist()}
                for w, b in zip(self.weights, self.biases)
            ],
            "log": self.log,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NetworkParams":
        weights, biases = [], []
        for layer in data["layers"]:
            weights.append(np.asarray(layer["weights"], dtype=float).reshape(layer["shape"]))
            biases.append(np.asarray(layer["bias"], dtype=float))
        return cls(weights, biases, list(data.get("log", [])))


def glorot_limit(fan_in: float, fan_out: float) -> float:
    return math.sqrt(6.0 / (fan_in + fan_out))


def init_custom(spec: NetworkSpec, importance_counts: Optional[Sequence[float]] = None) -> NetworkParams:
    """
    Glorot-uniform initialization with an importance-weighted first layer

    The first layer uses the effective fan-in sum(importance); row f of W1 is then
    multiplied by importance_f / mean(importance). Deeper layers are standard
    Glorot. Biases start at zero.

    Args:
        spec: Network layout and seed
        importance_counts: One value >= 1 per input feature (defaults to all ones)

    Returns:
        NetworkParams, identical for identical spec and counts
    """
    d = spec.layer_sizes[0]
    importance = np.ones(d) if importance_counts is None else np.asarray(importance_counts, dtype=float)
    if importance.shape != (d,):
        raise DataError(f"{importance.size} importance counts for input size {d}")
    if (importance < 1).any():
        raise DataError("importance counts must be >= 1")

    rng = np.random.default_rng(spec.seed)
    weights, biases = [], []
    for layer, (fan_in, fan_out) in enumerate(zip(spec.layer_sizes[:-1], spec.layer_sizes[1:])):
        if layer == 0:
            limit = glorot_limit(importance.sum(), fan_out)
            W = rng.uniform(-limit, limit, size=(fan_in, fan_out))
            W *= (importance / importance.mean())[:, None]
        else:
            limit = glorot_limit(fan_in, fan_out)
            W = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        weights.append(W)
        biases.append(np.zeros(fan_out))
    return NetworkParams(weights, biases)


def activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "tanh":
        return np.tanh(z)
    return 1.0 / (1.0 + np.exp(-np.clip(z, -LOGIT_CLAMP, LOGIT_CLAMP)))


def activation_grad(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Derivative of the activation at pre-activation z (a is its output)"""
    if name == "relu":
        return (z > 0).astype(float)
    if name == "tanh":
        return 1.0 - a ** 2
    return a * (1.0 - a)


def _forward_cache(spec: NetworkSpec, params: NetworkParams, X: np.ndarray):
    activations = [X]
    pre = []
    a = X
    for layer, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ W + b
        pre.append(z)
        if layer < len(params.weights) - 1:
            a = activate(spec.activations[layer], z)
            activations.append(a)
    logits = np.clip(pre[-1][:, 0], -LOGIT_CLAMP, LOGIT_CLAMP)
    return activations, pre, logits


def forward(spec: NetworkSpec, params: NetworkParams, X: np.ndarray) -> np.ndarray:
    """Class-1 probability per row, computed from logits clamped at +-30"""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != params.weights[0].shape[0]:
        raise DataError(f"input has shape {X.shape}, network expects {params.weights[0].shape[0]} columns")
    _, _, logits = _forward_cache(spec, params, X)
    return 1.0 / (1.0 + np.exp(-logits))


def bce_loss(spec: NetworkSpec, params: NetworkParams, X: np.ndarray, y: np.ndarray) -> float:
    """Mean binary cross-entropy evaluated from clamped logits"""
    _, _, logits = _forward_cache(spec, params, np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    return float(np.mean(np.logaddexp(0.0, logits) - y * logits))


def gradients(spec: NetworkSpec, params: NetworkParams, X: np.ndarray, y: np.ndarray
              ) -> Tuple[float, List[np.ndarray], List[np.ndarray]]:
    """
    Backpropagation of the mean BCE

    Returns:
        (loss, weight gradients, bias gradients) aligned with params
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    activations, pre, logits = _forward_cache(spec, params, X)
    n = X.shape[0]
    p = 1.0 / (1.0 + np.exp(-logits))
    loss = float(np.mean(np.logaddexp(0.0, logits) - y * logits))

    delta = ((p - y) / n)[:, None]
    grad_w: List[np.ndarray] = [None] * len(params.weights)
    grad_b: List[np.ndarray] = [None] * len(params.weights)
    for layer in range(len(params.weights) - 1, -1, -1):
        grad_w[layer] = activations[layer].T @ delta
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            upstream = delta @ params.weights[layer].T
            delta = upstream * activation_grad(spec.activations[layer - 1], pre[layer - 1], activations[layer])
    return loss, grad_w, grad_b
