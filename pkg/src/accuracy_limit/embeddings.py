"""Classical MDS, the 784-128-64-16 autoencoder and classifier head, and the
per-layer GDV profile used to track class clustering through a network."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ._numerics import check_finite
from .errors import DomainError, NumericError, ShapeError
from .metrics import gdv
from .neuralnet import LayerSpec, MlpModel, TrainConfig, forward, init_model, one_hot, train

MDS_MAX_POINTS = 2000
SPECTRUM_LENGTH = 784
EPOCH_SAMPLES = 7680
ENCODER_SIZES = (784, 128, 64, 16)


@dataclass
class MdsResult:
    coords: np.ndarray
    eigenvalues: np.ndarray      # full spectrum of the centred Gram matrix, descending
    indices: np.ndarray          # rows of the input that were embedded
    degenerate: bool = False


def double_centered_gram(points) -> np.ndarray:
    d2 = cdist(points, points, "sqeuclidean")
    n = d2.shape[0]
    j = np.eye(n) - 1.0 / n
    b = -0.5 * j @ d2 @ j
    return 0.5 * (b + b.T)


def classical_mds(points, target_dim: int = 2, max_points: int = MDS_MAX_POINTS,
                  seed: int = 0) -> MdsResult:
    """Torgerson scaling: top eigenpairs of the double-centred squared-distance
    matrix, coordinates ``v * sqrt(lambda)``.

    Inputs with more than ``max_points`` rows are subsampled (seeded). A
    negative eigenvalue among the requested ones marks the result degenerate;
    those axes are set to zero and a warning is issued.
    """
    x = np.atleast_2d(np.asarray(points, dtype=float))
    if not np.all(np.isfinite(x)):
        raise NumericError("points contain non-finite values")
    idx = np.arange(x.shape[0])
    if x.shape[0] > max_points:
        idx = np.sort(np.random.default_rng(seed).choice(x.shape[0], max_points, replace=False))
        x = x[idx]
    if x.shape[0] < target_dim + 1:
        raise DomainError(f"need at least {target_dim + 1} points for a {target_dim}-D embedding")
    b = double_centered_gram(x)
    w, v = np.linalg.eigh(b)
    w, v = w[::-1], v[:, ::-1]
    top = w[:target_dim]
    scale = max(abs(w[0]), 1.0)
    degenerate = bool(np.any(top < -1e-9 * scale))
    if degenerate:
        warnings.warn("Gram matrix has negative leading eigenvalues; axes clipped", RuntimeWarning)
    coords = v[:, :target_dim] * np.sqrt(np.clip(top, 0.0, None))
    return MdsResult(coords, w, idx, degenerate)


def spectrum_preprocess(epochs) -> np.ndarray:
    """Square-rooted FFT magnitudes of each epoch, lowest 784 bins, scaled
    jointly over all epochs into [0, 1].

    Epochs should already be z-scored over their whole recording.
    """
    rows = []
    for i, ep in enumerate(epochs):
        x = np.asarray(getattr(ep, "samples", ep), dtype=float)
        if x.size != EPOCH_SAMPLES:
            raise ShapeError(f"epoch {i} has {x.size} samples, expected {EPOCH_SAMPLES}")
        rows.append(np.sqrt(np.abs(np.fft.rfft(x)[:SPECTRUM_LENGTH])))
    spec = np.array(rows).reshape(len(rows), SPECTRUM_LENGTH)
    lo, hi = spec.min(initial=0.0), spec.max(initial=0.0)
    if hi > lo:
        spec = (spec - lo) / (hi - lo)
    return spec


def zscore_recording(signal) -> np.ndarray:
    x = check_finite(signal, "signal")
    sd = x.std()
    if sd == 0:
        raise DomainError("constant recording cannot be z-scored")
    return (x - x.mean()) / sd


def encoder_specs(sizes=ENCODER_SIZES) -> list[LayerSpec]:
    return [LayerSpec(a, b, "relu") for a, b in zip(sizes[:-1], sizes[1:])]


def autoencoder_specs(sizes=ENCODER_SIZES, output_activation: str = "relu") -> list[LayerSpec]:
    """Mirror-symmetric autoencoder, ReLU hidden layers.

    With a ReLU reconstruction layer an output unit whose pre-activation
    starts negative never receives gradient. That is harmless for inputs
    with many exact zeros (MNIST) but prevents exact fits of arbitrary
    vectors; ``output_activation="linear"`` avoids it.
    """
    back = tuple(reversed(sizes))
    dec = [LayerSpec(a, b, "relu") for a, b in zip(back[:-1], back[1:])]
    dec[-1] = LayerSpec(dec[-1].input_size, dec[-1].output_size, output_activation)
    return encoder_specs(sizes) + dec


def head_specs(n_classes: int, sizes=ENCODER_SIZES) -> list[LayerSpec]:
    return encoder_specs(sizes) + [LayerSpec(sizes[-1], n_classes, "softmax")]


def train_autoencoder(data, config: TrainConfig | None = None, sizes=ENCODER_SIZES,
                      output_activation: str = "relu"):
    config = config or TrainConfig(loss="mean_squared_error", max_epochs=20)
    if config.loss != "mean_squared_error":
        raise DomainError("autoencoders train on mean squared error")
    x = check_finite(np.atleast_2d(data), "data")
    if x.shape[1] != sizes[0]:
        raise ShapeError(f"inputs have {x.shape[1]} components, network expects {sizes[0]}")
    return train(init_model(autoencoder_specs(sizes, output_activation), config.seed), x, x, config)


def train_head(data, labels, n_classes: int, config: TrainConfig | None = None, sizes=ENCODER_SIZES):
    config = config or TrainConfig(max_epochs=20)
    x = check_finite(np.atleast_2d(data), "data")
    return train(init_model(head_specs(n_classes, sizes), config.seed), x,
                 one_hot(labels, n_classes), config)


def reconstruction_mse(model: MlpModel, data) -> float:
    x = np.atleast_2d(data)
    return float(np.mean((model.predict(x) - x) ** 2))


@dataclass
class LayerProfile:
    layers: tuple[int, ...]
    gdv: np.ndarray
    mds: list[MdsResult | None]
    activations: list[np.ndarray]


def layer_gdv_profile(model: MlpModel, data, labels, layers=(0, 1, 2, 3), with_mds: bool = True,
                      seed: int = 0) -> LayerProfile:
    """GDV (and optionally a 2-D MDS projection) of the input (layer 0) and of
    hidden layers 1..3 on one evaluation set.

    Constant dimensions (blank pixels, dead ReLU units) are dropped before
    z-scoring.
    """
    acts = forward(model, data)
    values, maps, chosen = [], [], []
    for k in layers:
        if not 0 <= k < len(acts):
            raise DomainError(f"network has no layer {k}")
        a = acts[k]
        chosen.append(a)
        values.append(gdv(a, labels, drop_constant=True, seed=seed))
        maps.append(classical_mds(a, 2, seed=seed) if with_mds else None)
    return LayerProfile(tuple(layers), np.array(values), maps, chosen)
