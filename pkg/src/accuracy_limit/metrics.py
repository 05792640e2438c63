"""General discrimination value (GDV) of labelled point sets.

Each dimension is z-scored (population standard deviation) and halved; the
GDV is then the mean intra-class distance minus the mean inter-class
distance, divided by ``sqrt(D)``. Values near 0 mean no class structure,
more negative values mean better separated classes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ._numerics import check_finite
from .errors import DomainError, ShapeError

MAX_POINTS = 10_000


def zscore_half(points, drop_constant: bool = False) -> np.ndarray:
    x = check_finite(np.atleast_2d(points), "points")
    sd = x.std(axis=0)
    constant = sd == 0
    if np.any(constant):
        if not drop_constant:
            raise DomainError(f"dimensions {np.flatnonzero(constant).tolist()} have zero variance")
        x, sd = x[:, ~constant], sd[~constant]
        if x.shape[1] == 0:
            raise DomainError("every dimension has zero variance")
    return 0.5 * (x - x.mean(axis=0)) / sd


def _pair_sums(s, labels, n_classes, block=512):
    """sums[l, m] = total distance over ordered pairs (i in l, j in m)."""
    sums = np.zeros((n_classes, n_classes))
    members = [labels == m for m in range(n_classes)]
    for start in range(0, s.shape[0], block):
        d = cdist(s[start:start + block], s)
        rows = labels[start:start + block]
        for m in range(n_classes):
            per_row = d[:, members[m]].sum(axis=1)
            sums[:, m] += np.bincount(rows, weights=per_row, minlength=n_classes)
    return sums


def gdv(points, labels, drop_constant: bool = False, max_points: int = MAX_POINTS,
        seed: int = 0) -> float:
    """GDV of a labelled point set.

    Parameters
    ----------
    points : (N, D) array
    labels : (N,) integer array
        Any integer labels; they are re-indexed internally.
    drop_constant : bool
        Discard zero-variance dimensions instead of raising. ``D`` then
        counts only the retained dimensions.
    max_points : int
        Larger inputs are subsampled (seeded) to this many points.
    """
    x = np.atleast_2d(np.asarray(points, dtype=float))
    _, lab = np.unique(np.asarray(labels).ravel(), return_inverse=True)
    if x.shape[0] != lab.size:
        raise ShapeError(f"{x.shape[0]} points but {lab.size} labels")
    if x.shape[0] > max_points:
        keep = np.sort(np.random.default_rng(seed).choice(x.shape[0], max_points, replace=False))
        x = x[keep]
        _, lab = np.unique(lab[keep], return_inverse=True)
    n_classes = int(lab.max()) + 1 if lab.size else 0
    if n_classes < 2:
        raise DomainError("GDV needs at least two classes")
    counts = np.bincount(lab, minlength=n_classes).astype(float)
    if np.any(counts < 2):
        raise DomainError("every class needs at least two points")
    s = zscore_half(x, drop_constant)
    sums = _pair_sums(s, lab, n_classes)
    intra = np.diag(sums) / (counts * (counts - 1))
    iu = np.triu_indices(n_classes, 1)
    # both orientations of each class pair, so relabelling classes is exact
    inter = 0.5 * (sums[iu] + sums.T[iu]) / (counts[iu[0]] * counts[iu[1]])
    return float((intra.mean() - inter.mean()) / np.sqrt(s.shape[1]))


@dataclass
class GdvSweep:
    values: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def std(self) -> float:
        return float(self.values.std())

    @property
    def neg_mean(self) -> float:
        return -self.mean


def gdv_sweep(datasets, **kwargs) -> GdvSweep:
    """GDV of each ``(points, labels)`` pair plus aggregate statistics."""
    datasets = list(datasets)
    if not datasets:
        raise DomainError("no data sets given")
    return GdvSweep(np.array([gdv(p, l, **kwargs) for p, l in datasets]))
