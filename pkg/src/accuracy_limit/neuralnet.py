"""Small fully connected network engine: forward pass, backpropagation, Adam.

Weights are stored as ``(output_size, input_size)`` matrices and batches as
``(n_samples, n_features)`` rows, so a layer computes ``a @ W.T + b``.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from ._numerics import check_finite
from .errors import ConfigurationError, InputError, ShapeError

ACTIVATIONS = ("relu", "softmax", "linear")
LOSSES = ("categorical_crossentropy", "mean_squared_error")


@dataclass(frozen=True)
class LayerSpec:
    input_size: int
    output_size: int
    activation: str = "relu"

    def __post_init__(self):
        if self.input_size < 1 or self.output_size < 1:
            raise ConfigurationError(f"layer sizes must be >= 1, got {self}")
        if self.activation not in ACTIVATIONS:
            raise ConfigurationError(f"unknown activation {self.activation!r}")


@dataclass
class MlpModel:
    layers: list[LayerSpec]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    @property
    def input_size(self) -> int:
        return self.layers[0].input_size

    @property
    def output_size(self) -> int:
        return self.layers[-1].output_size

    def copy(self) -> "MlpModel":
        return MlpModel(list(self.layers), [w.copy() for w in self.weights],
                        [b.copy() for b in self.biases])

    def predict(self, batch) -> np.ndarray:
        return forward(self, batch)[-1]


@dataclass
class TrainConfig:
    loss: str = "categorical_crossentropy"
    batch_size: int = 128
    max_epochs: int = 50
    min_epochs: int = 10
    validation_fraction: float = 0.2
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    patience: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.loss not in LOSSES:
            raise ConfigurationError(f"unknown loss {self.loss!r}")
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if self.max_epochs < 1:
            raise ConfigurationError("max_epochs must be >= 1")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigurationError("validation_fraction must lie in [0, 1)")
        if self.patience < 1:
            raise ConfigurationError("patience must be >= 1")


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    step: int = 0

    @classmethod
    def zeros_like(cls, params: list[np.ndarray]) -> "AdamState":
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def flat(self) -> np.ndarray:
        return np.concatenate([g.ravel() for pair in zip(self.weights, self.biases) for g in pair])


@dataclass
class TrainHistory:
    loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    best_epoch: int = -1

    def __len__(self):
        return len(self.loss)


def init_model(specs, seed: int = 0) -> MlpModel:
    """He-style uniform weights in ``±sqrt(6 / input_size)``, zero biases."""
    specs = list(specs)
    if not specs:
        raise ConfigurationError("a network needs at least one layer")
    for k, (a, b) in enumerate(zip(specs[:-1], specs[1:])):
        if a.output_size != b.input_size:
            raise ConfigurationError(
                f"layer {k} outputs {a.output_size} but layer {k + 1} expects {b.input_size}")
        if a.activation == "softmax":
            raise ConfigurationError("softmax is only allowed on the final layer")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for s in specs:
        limit = np.sqrt(6.0 / s.input_size)
        weights.append(rng.uniform(-limit, limit, size=(s.output_size, s.input_size)))
        biases.append(np.zeros(s.output_size))
    return MlpModel(specs, weights, biases)


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _activate(z, kind):
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "softmax":
        return softmax(z)
    return z


def forward(model: MlpModel, batch) -> list[np.ndarray]:
    """Activations of every layer, the input batch first."""
    a = np.atleast_2d(np.asarray(batch, dtype=float))
    if a.shape[1] != model.input_size:
        raise ShapeError(f"batch has {a.shape[1]} columns, network expects {model.input_size}")
    acts = [a]
    for spec, w, b in zip(model.layers, model.weights, model.biases):
        a = _activate(a @ w.T + b, spec.activation)
        acts.append(a)
    return acts


def loss_value(model: MlpModel, batch, targets, loss: str) -> float:
    pred = forward(model, batch)[-1]
    return _loss(pred, np.asarray(targets, dtype=float), loss)


def _loss(pred, targets, loss):
    if loss == "categorical_crossentropy":
        return float(-np.mean(np.sum(targets * np.log(np.clip(pred, 1e-300, None)), axis=1)))
    return float(np.mean((pred - targets) ** 2))


def _output_delta(model, pred, targets, loss):
    """dLoss/d(pre-activation) of the final layer."""
    n = pred.shape[0]
    kind = model.layers[-1].activation
    if loss == "categorical_crossentropy":
        if kind != "softmax":
            raise ConfigurationError("categorical crossentropy needs a softmax output layer")
        return (pred - targets) / n
    g = 2.0 * (pred - targets) / pred.size
    if kind == "softmax":
        return pred * (g - np.sum(g * pred, axis=1, keepdims=True))
    if kind == "relu":
        return g * (pred > 0)
    return g


def backward(model: MlpModel, batch, targets, loss: str) -> Gradients:
    batch = check_finite(batch, "batch")
    targets = check_finite(targets, "targets")
    acts = forward(model, batch)
    if targets.shape != acts[-1].shape:
        raise ShapeError(f"targets shaped {targets.shape}, network output {acts[-1].shape}")
    delta = _output_delta(model, acts[-1], targets, loss)
    gw = [None] * len(model.layers)
    gb = [None] * len(model.layers)
    for k in range(len(model.layers) - 1, -1, -1):
        gw[k] = delta.T @ acts[k]
        gb[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ model.weights[k]) * (acts[k] > 0)
    return Gradients(gw, gb)


def adam_step(model: MlpModel, grads: Gradients, state: AdamState, config: TrainConfig) -> None:
    state.step += 1
    params = model.weights + model.biases
    gs = grads.weights + grads.biases
    b1, b2 = config.beta1, config.beta2
    c1 = 1.0 - b1 ** state.step
    c2 = 1.0 - b2 ** state.step
    for p, g, m, v in zip(params, gs, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= config.learning_rate * (m / c1) / (np.sqrt(v / c2) + config.epsilon)


def train(model: MlpModel, inputs, targets, config: TrainConfig) -> tuple[MlpModel, TrainHistory]:
    """Mini-batch Adam training with optional early stopping.

    A seeded random ``validation_fraction`` of the rows is held out. After at
    least ``min_epochs`` epochs training stops once the validation loss has
    not improved for ``patience`` epochs, and the weights with the lowest
    validation loss are returned. Without a validation set all
    ``max_epochs`` epochs run and the final weights are returned.
    The input model is not modified.
    """
    x = check_finite(inputs, "inputs")
    y = check_finite(targets, "targets")
    if x.ndim != 2 or x.shape[0] == 0:
        raise InputError("training data is empty")
    if y.shape[0] != x.shape[0]:
        raise ShapeError("inputs and targets differ in row count")
    rng = np.random.default_rng(config.seed)
    n = x.shape[0]
    n_val = int(round(n * config.validation_fraction))
    if n_val >= n:
        raise InputError("validation split leaves no training rows")
    order = rng.permutation(n)
    val_idx, tr_idx = order[:n_val], order[n_val:]
    x_tr, y_tr = x[tr_idx], y[tr_idx]
    x_val, y_val = x[val_idx], y[val_idx]

    model = model.copy()
    state = AdamState.zeros_like(model.weights + model.biases)
    history = TrainHistory()
    best, best_val, wait = model.copy(), np.inf, 0
    for epoch in range(config.max_epochs):
        perm = rng.permutation(len(tr_idx))
        total = 0.0
        for start in range(0, len(perm), config.batch_size):
            sel = perm[start:start + config.batch_size]
            xb, yb = x_tr[sel], y_tr[sel]
            total += loss_value(model, xb, yb, config.loss) * len(sel)
            adam_step(model, backward(model, xb, yb, config.loss), state, config)
        history.loss.append(total / len(perm))
        if n_val == 0:
            continue
        val = loss_value(model, x_val, y_val, config.loss)
        history.val_loss.append(val)
        if val < best_val:
            best, best_val, wait = model.copy(), val, 0
            history.best_epoch = epoch
        else:
            wait += 1
            if wait >= config.patience and epoch + 1 >= config.min_epochs:
                break
    if n_val == 0:
        history.best_epoch = len(history.loss) - 1
        return model, history
    return best, history


def one_hot(labels, n_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    out = np.zeros((labels.size, n_classes))
    out[np.arange(labels.size), labels] = 1.0
    return out


def clone_config(config: TrainConfig, **changes) -> TrainConfig:
    new = copy.copy(config)
    for k, v in changes.items():
        setattr(new, k, v)
    new.__post_init__()
    return new
