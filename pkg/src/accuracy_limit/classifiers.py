"""Naive Bayes (per-feature KDE), correlated Gaussian Bayes, perceptron, and
random dimensionality expansion, all behind one fit/posterior/predict shape.

Every model exposes ``posterior(u)`` returning an (n, K) array of class
probabilities and ``predict(u)`` returning labels. Likelihoods are combined
in log space with a flat prior unless ``empirical_priors`` is set at fit time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ._numerics import LOG_FLOOR, check_finite, normalize_log_likelihoods
from .errors import ConfigurationError, FitError, InputError, ShapeError
from .neuralnet import LayerSpec, MlpModel, TrainConfig, TrainHistory, init_model, one_hot, train

_LOG_SQRT_2PI = 0.5 * np.log(2 * np.pi)


def _class_count(y, n_classes):
    k = int(y.max()) + 1 if n_classes is None else n_classes
    counts = np.bincount(y, minlength=k)
    if counts.size > k:
        raise FitError(f"labels exceed n_classes={k}")
    return k, counts


def _log_priors(counts, empirical):
    if empirical:
        return np.log(counts / counts.sum())
    return np.full(counts.size, -np.log(counts.size))


class _BayesBase:
    log_prior: np.ndarray

    def log_likelihood(self, u) -> np.ndarray:
        raise NotImplementedError

    def posterior(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        ll = self.log_likelihood(np.atleast_2d(u))
        post = normalize_log_likelihoods(ll + self.log_prior)
        return post[0] if u.ndim == 1 else post

    def predict(self, u) -> np.ndarray:
        return np.argmax(self.posterior(np.atleast_2d(u)), axis=1)


# ---------------------------------------------------------------- naive Bayes

def scott_bandwidth(samples) -> float:
    """Scott's rule for univariate data, ``std * n**(-1/5)`` (sample std).

    Degenerate data (one sample or zero spread) get a tiny positive floor so
    the kernel stays a valid density.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    std = samples.std(ddof=1) if n > 1 else 0.0
    h = std * n ** (-1.0 / 5.0)
    floor = 1e-6 * (1.0 + abs(samples.mean()))
    return float(h) if h > floor else floor


@dataclass
class NaiveBayesModel(_BayesBase):
    samples: list[np.ndarray]      # per class, (n_c, D)
    bandwidths: np.ndarray         # (K, D)
    log_prior: np.ndarray

    @property
    def n_classes(self) -> int:
        return len(self.samples)

    @property
    def n_features(self) -> int:
        return self.bandwidths.shape[1]

    def log_marginals(self, u, chunk: int = 256) -> np.ndarray:
        """Floored per-feature log KDE densities, shape (n, K, D)."""
        u = check_finite(np.atleast_2d(u), "u")
        if u.shape[1] != self.n_features:
            raise ShapeError(f"vectors have {u.shape[1]} features, model has {self.n_features}")
        out = np.empty((u.shape[0], self.n_classes, self.n_features))
        for c, xs in enumerate(self.samples):
            norm = np.log(xs.shape[0]) + np.log(self.bandwidths[c]) + _LOG_SQRT_2PI
            for f in range(self.n_features):
                h = self.bandwidths[c, f]
                col = xs[:, f]
                for s in range(0, u.shape[0], chunk):
                    z = (u[s:s + chunk, f, None] - col[None, :]) / h
                    out[s:s + chunk, c, f] = logsumexp(-0.5 * z * z, axis=1) - norm[f]
        return np.maximum(out, LOG_FLOOR)

    def log_likelihood(self, u) -> np.ndarray:
        return self.log_marginals(u).sum(axis=2)


def fit_naive_bayes(x, y, n_classes: int | None = None, empirical_priors: bool = False) -> NaiveBayesModel:
    x = check_finite(np.atleast_2d(x), "training features")
    y = np.asarray(y, dtype=int)
    k, counts = _class_count(y, n_classes)
    if np.any(counts == 0):
        raise FitError(f"classes {np.flatnonzero(counts == 0).tolist()} have no training samples")
    samples = [x[y == c].copy() for c in range(k)]
    bw = np.array([[scott_bandwidth(s[:, f]) for f in range(x.shape[1])] for s in samples])
    return NaiveBayesModel(samples, bw, _log_priors(counts, empirical_priors))


def nb_posterior(model: NaiveBayesModel, u) -> np.ndarray:
    return model.posterior(u)


# ------------------------------------------------- correlated Gaussian Bayes

@dataclass
class CmvgModel(_BayesBase):
    means: np.ndarray              # (K, D)
    covs: np.ndarray               # (K, D, D), ridge included
    log_prior: np.ndarray
    ridged: np.ndarray             # (K,) bool
    _chol: np.ndarray = field(init=False, repr=False)
    logdets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._chol = np.linalg.cholesky(self.covs)
        self.logdets = 2.0 * np.log(np.diagonal(self._chol, axis1=1, axis2=2)).sum(axis=1)

    @property
    def n_classes(self) -> int:
        return self.means.shape[0]

    @property
    def precisions(self) -> np.ndarray:
        return np.linalg.inv(self.covs)

    def log_likelihood(self, u) -> np.ndarray:
        u = check_finite(np.atleast_2d(u), "u")
        d = self.means.shape[1]
        if u.shape[1] != d:
            raise ShapeError(f"vectors have {u.shape[1]} features, model has {d}")
        out = np.empty((u.shape[0], self.n_classes))
        for c in range(self.n_classes):
            z = np.linalg.solve(self._chol[c], (u - self.means[c]).T)
            out[:, c] = -0.5 * (d * np.log(2 * np.pi) + self.logdets[c] + np.sum(z * z, axis=0))
        return out


def fit_cmvg(x, y, n_classes: int | None = None, empirical_priors: bool = False) -> CmvgModel:
    """Per-class sample mean and covariance; a small ridge rescues singular ones."""
    x = check_finite(np.atleast_2d(x), "training features")
    y = np.asarray(y, dtype=int)
    k, counts = _class_count(y, n_classes)
    if np.any(counts < 2):
        raise FitError(f"classes {np.flatnonzero(counts < 2).tolist()} have fewer than 2 samples")
    d = x.shape[1]
    means = np.empty((k, d))
    covs = np.empty((k, d, d))
    ridged = np.zeros(k, dtype=bool)
    for c in range(k):
        xc = x[y == c]
        means[c] = xc.mean(axis=0)
        cov = np.atleast_2d(np.cov(xc, rowvar=False))
        if np.linalg.eigvalsh(cov).min() < 1e-10:
            eps = 1e-6 * np.mean(np.diag(cov))
            cov = cov + max(eps, 1e-12) * np.eye(d)
            ridged[c] = True
        covs[c] = cov
    return CmvgModel(means, covs, _log_priors(counts, empirical_priors), ridged)


def cmvg_posterior(model: CmvgModel, u) -> np.ndarray:
    return model.posterior(u)


# ----------------------------------------------------------------- perceptron

@dataclass
class PerceptronClassifier:
    model: MlpModel
    history: TrainHistory | None = None

    @property
    def n_classes(self) -> int:
        return self.model.output_size

    def posterior(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        p = self.model.predict(np.atleast_2d(u))
        return p[0] if u.ndim == 1 else p

    def predict(self, u) -> np.ndarray:
        return np.argmax(self.model.predict(np.atleast_2d(u)), axis=1)


def fit_perceptron(x, y, config: TrainConfig | None = None, hidden: int = 100,
                   n_classes: int | None = None) -> PerceptronClassifier:
    """One ReLU hidden layer and a softmax output, trained on crossentropy."""
    config = config or TrainConfig()
    if config.loss != "categorical_crossentropy":
        raise ConfigurationError("the perceptron classifier trains on categorical crossentropy")
    x = check_finite(np.atleast_2d(x), "training features")
    y = np.asarray(y, dtype=int)
    k, _ = _class_count(y, n_classes)
    specs = [LayerSpec(x.shape[1], hidden, "relu"), LayerSpec(hidden, k, "softmax")]
    model, history = train(init_model(specs, config.seed), x, one_hot(y, k), config)
    return PerceptronClassifier(model, history)


# ------------------------------------------- random dimensionality expansion

@dataclass
class RdeWrapper:
    """Inputs are multiplied by a fixed random ``(D2, D)`` Gaussian matrix before
    reaching the inner classifier, at fit time and at predict time alike."""

    matrix: np.ndarray
    inner: object

    def expand(self, u) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        if u.shape[1] != self.matrix.shape[1]:
            raise ShapeError(f"vectors have {u.shape[1]} features, expansion expects {self.matrix.shape[1]}")
        return u @ self.matrix.T

    @property
    def n_classes(self) -> int:
        return self.inner.n_classes

    def posterior(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        p = self.inner.posterior(self.expand(u))
        return p[0] if u.ndim == 1 else p

    def predict(self, u) -> np.ndarray:
        return self.inner.predict(self.expand(u))


FITTERS = {
    "naive_bayes": fit_naive_bayes,
    "cmvg": fit_cmvg,
    "perceptron": fit_perceptron,
}


def fit_classifier(kind: str, x, y, n_classes: int | None = None, config: TrainConfig | None = None):
    if kind not in FITTERS:
        raise ConfigurationError(f"unknown classifier {kind!r}; choose from {sorted(FITTERS)}")
    if kind == "perceptron":
        return fit_perceptron(x, y, config=config, n_classes=n_classes)
    return FITTERS[kind](x, y, n_classes=n_classes)


def fit_rde(kind: str, x, y, expanded_dims: int | None = None, seed: int = 0,
            n_classes: int | None = None, config: TrainConfig | None = None) -> RdeWrapper:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    d = x.shape[1]
    d2 = 10 * d if expanded_dims is None else expanded_dims
    if d2 <= d:
        raise ConfigurationError(f"expanded dimension {d2} must exceed input dimension {d}")
    m = np.random.default_rng(seed).standard_normal((d2, d))
    return RdeWrapper(m, fit_classifier(kind, x @ m.T, y, n_classes=n_classes, config=config))


# ----------------------------------------------------------------- evaluation

@dataclass
class Evaluation:
    accuracy: float
    confusion: np.ndarray          # column i: distribution of predictions for true class i
    counts: np.ndarray             # raw counts, counts[j, i]


def evaluate(model, x, y, n_classes: int | None = None) -> Evaluation:
    y = np.asarray(y, dtype=int)
    if y.size == 0:
        raise InputError("test set is empty")
    pred = np.asarray(model.predict(x), dtype=int)
    k = n_classes or max(getattr(model, "n_classes", 0), int(y.max()) + 1, int(pred.max()) + 1)
    counts = np.zeros((k, k))
    np.add.at(counts, (pred, y), 1)
    totals = counts.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        conf = np.where(totals > 0, counts / totals, 0.0)
    return Evaluation(float(np.mean(pred == y)), conf, counts)


def rde_fit_predict(kind: str, train_x, train_y, test_x, test_y, expanded_dims: int | None = None,
                    seed: int = 0, config: TrainConfig | None = None) -> Evaluation:
    model = fit_rde(kind, train_x, train_y, expanded_dims, seed, config=config)
    return evaluate(model, test_x, test_y)
