"""Two-class superstatistical data generator with controls D, S and C.

For every repetition a fresh parameter set is drawn: class 0 has mean zero,
class 1 has means uniform in ``[0, S]``; both covariances have a unit
diagonal and off-diagonal entries drawn from a box density set by ``C``.
Gaussian vectors are then sampled from each class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset, split_dataset
from .errors import ConfigurationError, DomainError, ShapeError


@dataclass(frozen=True)
class DscControl:
    dimensions: int
    separation: float
    correlation: float
    n_rep: int = 1
    n_vec: int = 10000
    seed: int = 0

    def __post_init__(self):
        if self.dimensions < 1:
            raise ConfigurationError("dimensions must be >= 1")
        if self.separation < 0:
            raise ConfigurationError("separation must be non-negative")
        if not 0.0 <= self.correlation <= 2.0:
            raise ConfigurationError("correlation must lie in [0, 2]")
        if self.n_rep < 1:
            raise ConfigurationError("n_rep must be >= 1")
        if self.n_vec < 2 or self.n_vec % 2:
            raise ConfigurationError("n_vec must be a positive even number")


@dataclass
class ClassParams:
    mu: np.ndarray
    sigma: np.ndarray

    @property
    def dimensions(self) -> int:
        return self.mu.size


def sample_offdiag(C: float, rng) -> float:
    """Draw one off-diagonal covariance entry: uniform on [0, C] for C <= 1,
    uniform on [C - 1, 1] above."""
    return float(rng.uniform(*_offdiag_bounds(C)))


def _offdiag_bounds(C):
    if not 0.0 <= C <= 2.0:
        raise DomainError(f"correlation control must lie in [0, 2], got {C}")
    return (0.0, C) if C <= 1.0 else (C - 1.0, 1.0)


def repair_psd(sigma, method: str = "abs") -> np.ndarray:
    """Map a symmetric matrix to a positive semidefinite one.

    Matrices that are already PSD are returned unchanged. Otherwise the
    negative eigenvalues are either reflected (``"abs"``, the covariance that
    SVD-based Gaussian sampling produces from an indefinite matrix) or set
    to zero (``"clip"``).
    """
    sigma = np.asarray(sigma, dtype=float)
    w, v = np.linalg.eigh(sigma)
    if w.min() >= 0.0:
        return sigma.copy()
    if method == "abs":
        w = np.abs(w)
    elif method == "clip":
        w = np.clip(w, 0.0, None)
    else:
        raise ConfigurationError(f"unknown PSD repair method {method!r}")
    out = (v * w) @ v.T
    return 0.5 * (out + out.T)


def random_covariance(D: int, C: float, rng, repair: str = "abs") -> np.ndarray:
    lo, hi = _offdiag_bounds(C)
    sigma = np.eye(D)
    iu = np.triu_indices(D, 1)
    sigma[iu] = rng.uniform(lo, hi, size=iu[0].size)
    sigma[(iu[1], iu[0])] = sigma[iu]
    return repair_psd(sigma, repair)


def build_class_params(control: DscControl, rng, repair: str = "abs") -> tuple[ClassParams, ClassParams]:
    D = control.dimensions
    mu1 = rng.uniform(0.0, control.separation, size=D)
    p0 = ClassParams(np.zeros(D), random_covariance(D, control.correlation, rng, repair))
    p1 = ClassParams(mu1, random_covariance(D, control.correlation, rng, repair))
    return p0, p1


def sample_gaussian(mu, sigma, n: int, rng) -> np.ndarray:
    """Gaussian rows via ``mu + V sqrt(L) z``; exact for singular ``sigma``."""
    w, v = np.linalg.eigh(np.asarray(sigma, dtype=float))
    # round-off eigenvalues of a singular matrix would leak noise into null directions
    w = np.where(w > 1e-12 * max(w.max(), 0.0), w, 0.0)
    z = rng.standard_normal((n, mu.size))
    return mu + (z * np.sqrt(w)) @ v.T


def sample_dataset(params0: ClassParams, params1: ClassParams, n_vec: int, rng) -> LabeledDataset:
    if params0.dimensions != params1.dimensions:
        raise ShapeError("class parameter sets differ in dimension")
    if n_vec < 2 or n_vec % 2:
        raise ConfigurationError("n_vec must be a positive even number")
    half = n_vec // 2
    x = np.vstack([sample_gaussian(params0.mu, params0.sigma, half, rng),
                   sample_gaussian(params1.mu, params1.sigma, half, rng)])
    y = np.repeat([0, 1], half)
    order = rng.permutation(n_vec)
    return LabeledDataset(x[order], y[order])


def offdiag_rms(sigma) -> float:
    """Root-mean-square of the strictly upper-triangular entries."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape[0] < 2:
        raise DomainError("a 1x1 matrix has no off-diagonal entries")
    return float(np.sqrt(np.mean(sigma[np.triu_indices(sigma.shape[0], 1)] ** 2)))


def repetition_seeds(seed: int, n: int) -> list[np.random.SeedSequence]:
    """Independent child seeds, one per repetition, fixed by the master seed."""
    return np.random.SeedSequence(seed).spawn(n)


@dataclass
class DscRepetition:
    params: tuple[ClassParams, ClassParams]
    data: LabeledDataset


def generate(control: DscControl, train_fraction: float = 0.8,
             repair: str = "abs") -> list[DscRepetition]:
    """All ``n_rep`` data sets for one control triple, each already split."""
    out = []
    for ss in repetition_seeds(control.seed, control.n_rep):
        rng = np.random.default_rng(ss)
        params = build_class_params(control, rng, repair)
        data = sample_dataset(*params, control.n_vec, rng)
        out.append(DscRepetition(params, split_dataset(data, train_fraction, rng)))
    return out
