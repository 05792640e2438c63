"""Ideal (Bayes) classifier and the accuracy limit of Gaussian class mixtures.

The confusion matrix ``C[j, i]`` is the probability that a vector generated
under class ``i`` is assigned to class ``j`` by the posterior-argmax
classifier. It is computed either by midpoint-rule integration over a
regular grid (up to three dimensions) or by Monte Carlo sampling.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._numerics import check_finite, normalize_log_likelihoods
from .errors import ConfigurationError, CoverageError, DomainError, ShapeError

RIDGE = 1e-9


class GaussianClassDensity:
    """Multivariate normal density with cached precision and log-determinant."""

    def __init__(self, mu, sigma):
        self.mu = np.atleast_1d(np.asarray(mu, dtype=float))
        sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
        if sigma.shape != (self.mu.size, self.mu.size):
            raise ShapeError(f"covariance {sigma.shape} does not match mean of size {self.mu.size}")
        if not np.allclose(sigma, sigma.T, atol=1e-12):
            raise DomainError("covariance must be symmetric")
        self.ridged = False
        if np.linalg.eigvalsh(sigma).min() < RIDGE:
            sigma = sigma + RIDGE * np.eye(self.mu.size)
            self.ridged = True
            warnings.warn("near-singular covariance: ridge added before inversion", RuntimeWarning)
        self.sigma = sigma
        self._chol = np.linalg.cholesky(sigma)
        self.logdet = 2.0 * np.log(np.diag(self._chol)).sum()
        self.precision = np.linalg.inv(sigma)
        self.log_norm = -0.5 * (self.mu.size * np.log(2 * np.pi) + self.logdet)

    @property
    def dimensions(self) -> int:
        return self.mu.size

    def logpdf(self, x) -> np.ndarray:
        x = np.atleast_2d(x)
        z = np.linalg.solve(self._chol, (x - self.mu).T)
        return self.log_norm - 0.5 * np.sum(z * z, axis=0)

    def pdf(self, x) -> np.ndarray:
        return np.exp(self.logpdf(x))

    def sample(self, n: int, rng) -> np.ndarray:
        return self.mu + rng.standard_normal((n, self.mu.size)) @ self._chol.T


@dataclass
class MixtureProblem:
    classes: list[GaussianClassDensity]
    priors: np.ndarray | None = None

    def __post_init__(self):
        k = len(self.classes)
        if k < 2:
            raise ConfigurationError("a classification problem needs at least two classes")
        if len({c.dimensions for c in self.classes}) != 1:
            raise ShapeError("all class densities must share one dimension")
        if self.priors is None:
            self.priors = np.full(k, 1.0 / k)
        self.priors = np.asarray(self.priors, dtype=float)
        if self.priors.shape != (k,) or np.any(self.priors < 0):
            raise ConfigurationError("priors must be K non-negative numbers")
        if abs(self.priors.sum() - 1.0) > 1e-12:
            raise ConfigurationError("priors must sum to 1")

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def dimensions(self) -> int:
        return self.classes[0].dimensions

    def log_densities(self, x) -> np.ndarray:
        """``log p_gen(x | i)`` as an (n, K) array."""
        x = check_finite(np.atleast_2d(x), "x")
        if x.shape[1] != self.dimensions:
            raise ShapeError(f"points have {x.shape[1]} components, problem has {self.dimensions}")
        return np.column_stack([c.logpdf(x) for c in self.classes])

    def posterior(self, x) -> np.ndarray:
        """Bayes posterior per row; uniform where every density underflows."""
        with np.errstate(divide="ignore"):
            lp = self.log_densities(x) + np.log(self.priors)
        post = normalize_log_likelihoods(lp, floor=False)
        return post[0] if np.ndim(x) == 1 else post

    def ideal_class(self, x):
        """Posterior argmax; exact ties go to the lowest class index."""
        labels = np.argmax(self.posterior(np.atleast_2d(x)), axis=1)
        return int(labels[0]) if np.ndim(x) == 1 else labels

    def sample(self, n_per_class: int, rng) -> tuple[np.ndarray, np.ndarray]:
        x = np.vstack([c.sample(n_per_class, rng) for c in self.classes])
        y = np.repeat(np.arange(self.n_classes), n_per_class)
        return x, y


def two_class_problem(d: float, rho0: float = 0.0, rho1: float = 0.0) -> MixtureProblem:
    """Unit-variance 2D classes centred at ``(-d/2, 0)`` and ``(+d/2, 0)`` with
    feature correlations ``rho0`` and ``rho1``."""
    def cov(r):
        return np.array([[1.0, r], [r, 1.0]])
    return MixtureProblem([GaussianClassDensity([-d / 2, 0.0], cov(rho0)),
                           GaussianClassDensity([d / 2, 0.0], cov(rho1))])


@dataclass
class GridSpec:
    lower: np.ndarray
    upper: np.ndarray
    spacing: np.ndarray

    def __post_init__(self):
        self.lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        self.upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        self.spacing = np.broadcast_to(np.asarray(self.spacing, dtype=float), self.lower.shape).copy()
        if not (self.lower.shape == self.upper.shape):
            raise ShapeError("lower and upper bounds differ in length")
        if np.any(self.lower >= self.upper) or np.any(self.spacing <= 0):
            raise ConfigurationError("need lower < upper and spacing > 0 in every dimension")
        if self.lower.size > 3:
            raise ConfigurationError("grid integration supports at most 3 dimensions")

    @classmethod
    def cube(cls, dims: int, half_width: float = 8.0, spacing: float = 0.01) -> "GridSpec":
        return cls(np.full(dims, -half_width), np.full(dims, half_width), spacing)

    @property
    def dimensions(self) -> int:
        return self.lower.size

    def axes(self) -> list[np.ndarray]:
        """Cell midpoints along every dimension."""
        out = []
        for lo, hi, h in zip(self.lower, self.upper, self.spacing):
            n = int(round((hi - lo) / h))
            out.append(lo + (np.arange(n) + 0.5) * (hi - lo) / n)
        return out

    def cell_volume(self) -> float:
        return float(np.prod([(hi - lo) / int(round((hi - lo) / h))
                              for lo, hi, h in zip(self.lower, self.upper, self.spacing)]))


@dataclass
class ConfusionResult:
    matrix: np.ndarray
    stderr: np.ndarray | None = None
    raw_mass: np.ndarray | None = None
    n_per_class: int | None = None

    @property
    def accuracy(self) -> float:
        return accuracy_from_confusion(self.matrix)

    @property
    def accuracy_stderr(self) -> float | None:
        if self.stderr is None:
            return None
        return float(np.sqrt(np.sum(np.diag(self.stderr) ** 2)) / self.matrix.shape[0])


def confusion_grid(problem: MixtureProblem, grid: GridSpec, chunk: int = 200_000) -> ConfusionResult:
    """Integrate indicator x density over grid cells; columns renormalized."""
    if grid.dimensions != problem.dimensions:
        raise ShapeError("grid and problem dimensions differ")
    axes = grid.axes()
    first, rest = axes[0], axes[1:]
    tail = (np.stack(np.meshgrid(*rest, indexing="ij"), axis=-1).reshape(-1, len(rest))
            if rest else np.zeros((1, 0)))
    rows_per_chunk = max(1, chunk // tail.shape[0])
    k = problem.n_classes
    mass = np.zeros((k, k))
    for start in range(0, first.size, rows_per_chunk):
        head = first[start:start + rows_per_chunk]
        pts = np.column_stack([np.repeat(head, tail.shape[0]), np.tile(tail, (head.size, 1))])
        lp = problem.log_densities(pts)
        with np.errstate(divide="ignore"):
            assigned = np.argmax(normalize_log_likelihoods(lp + np.log(problem.priors), floor=False), axis=1)
        dens = np.exp(lp)
        for j in range(k):
            mass[j] += dens[assigned == j].sum(axis=0)
    mass *= grid.cell_volume()
    cols = mass.sum(axis=0)
    if np.any(np.abs(cols - 1.0) > 1e-3):
        raise CoverageError(f"grid holds column masses {cols}; enlarge the grid")
    return ConfusionResult(mass / cols, raw_mass=cols)


def confusion_mc(problem: MixtureProblem, n_samples: int, rng, batch: int = 200_000) -> ConfusionResult:
    """Monte Carlo confusion matrix: ``n_samples / K`` draws per class.

    Standard errors are binomial, ``sqrt(p (1 - p) / n)`` per entry.
    """
    if n_samples < 1000:
        raise DomainError("Monte Carlo estimation needs at least 1000 samples")
    k = problem.n_classes
    n = n_samples // k
    counts = np.zeros((k, k))
    for i, dens in enumerate(problem.classes):
        done = 0
        while done < n:
            m = min(batch, n - done)
            labels = problem.ideal_class(dens.sample(m, rng))
            counts[:, i] += np.bincount(labels, minlength=k)
            done += m
    p = counts / n
    return ConfusionResult(p, stderr=np.sqrt(p * (1 - p) / n), n_per_class=n)


def accuracy_from_confusion(c) -> float:
    """Mean of the diagonal of a column-stochastic confusion matrix."""
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ShapeError("confusion matrix must be square")
    if np.any(np.abs(c.sum(axis=0) - 1.0) > 1e-6):
        raise DomainError("confusion matrix columns must sum to 1")
    return float(np.mean(np.diag(c)))


@dataclass
class LimitCurve:
    distances: np.ndarray
    accuracy: np.ndarray
    stderr: np.ndarray = field(default=None)


def limit_curve(distances, rho0: float = 0.0, rho1: float = 0.0, method: str = "grid",
                grid: GridSpec | None = None, n_samples: int = 100_000, rng=None) -> LimitCurve:
    """Accuracy limit of the two-class 2D problem as a function of centre distance."""
    distances = np.asarray(distances, dtype=float)
    acc, err = [], []
    for d in distances:
        problem = two_class_problem(d, rho0, rho1)
        if method == "grid":
            res = confusion_grid(problem, grid or GridSpec.cube(2))
        elif method == "mc":
            res = confusion_mc(problem, n_samples, rng if rng is not None else np.random.default_rng(0))
        else:
            raise ConfigurationError(f"unknown method {method!r}")
        acc.append(res.accuracy)
        err.append(res.accuracy_stderr if res.accuracy_stderr is not None else 0.0)
    return LimitCurve(distances, np.array(acc), np.array(err))
