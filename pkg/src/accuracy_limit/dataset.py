from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, ShapeError


@dataclass
class LabeledDataset:
    """Feature rows with integer class labels and an optional train/test split."""

    features: np.ndarray
    labels: np.ndarray
    train_idx: np.ndarray | None = None
    test_idx: np.ndarray | None = None

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.labels = np.asarray(self.labels, dtype=int).ravel()
        if self.features.shape[0] != self.labels.size:
            raise ShapeError(
                f"{self.features.shape[0]} feature rows but {self.labels.size} labels")

    def __len__(self):
        return self.labels.size

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @property
    def is_split(self) -> bool:
        return self.train_idx is not None

    def train(self) -> tuple[np.ndarray, np.ndarray]:
        self._need_split()
        return self.features[self.train_idx], self.labels[self.train_idx]

    def test(self) -> tuple[np.ndarray, np.ndarray]:
        self._need_split()
        return self.features[self.test_idx], self.labels[self.test_idx]

    def with_features(self, features) -> "LabeledDataset":
        """Same labels and split, new feature matrix (e.g. after a transform)."""
        return replace(self, features=np.asarray(features, dtype=float))

    def _need_split(self):
        if not self.is_split:
            raise DomainError("dataset has no train/test split; call split_dataset first")


def split_dataset(data: LabeledDataset, train_fraction: float, rng) -> LabeledDataset:
    """Random train/test partition with ``round(n * train_fraction)`` training rows."""
    if not 0.0 < train_fraction < 1.0:
        raise DomainError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = len(data)
    n_train = int(np.floor(n * train_fraction + 0.5))
    order = rng.permutation(n)
    return replace(data, train_idx=np.sort(order[:n_train]), test_idx=np.sort(order[n_train:]))
