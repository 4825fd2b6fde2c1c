"""
Labeled dataset container.
"""

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from ..errors import ContractError


@dataclass
class Dataset:
    """Row-major features (N, D) with integer labels (N,)."""

    features: np.ndarray
    labels: np.ndarray
    num_classes: Optional[int] = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if self.features.ndim == 1:
            self.features = self.features.reshape(-1, 1)
        if self.features.shape[0] != self.labels.shape[0]:
            raise ContractError(
                f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} labels"
            )
        if self.num_classes is None:
            self.num_classes = int(self.labels.max()) + 1 if self.labels.size else 0

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def input_dim(self) -> int:
        return int(self.features.shape[1])

    def is_empty(self) -> bool:
        return len(self) == 0

    def subset(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.features[indices], self.labels[indices], self.num_classes)

    def split(self, test_fraction: float, seed: int = 0) -> Tuple["Dataset", "Dataset"]:
        """Shuffle deterministically and split off a test portion."""
        if not 0.0 <= test_fraction < 1.0:
            raise ContractError(f"test_fraction must lie in [0, 1), got {test_fraction}")
        order = np.random.default_rng(seed).permutation(len(self))
        test_size = int(round(test_fraction * len(self)))
        return self.subset(order[test_size:]), self.subset(order[:test_size])


class BatchSampler:
    """Endless stream of shuffled mini-batches; reshuffles every epoch."""

    def __init__(self, dataset: Dataset, batch_size: int, seed: int):
        if dataset.is_empty():
            raise ContractError("cannot sample batches from an empty dataset")
        if batch_size < 1:
            raise ContractError(f"batch_size must be positive, got {batch_size}")
        self._dataset = dataset
        self._batch_size = min(batch_size, len(dataset))
        self._rng = np.random.default_rng(seed)
        self._order = self._rng.permutation(len(dataset))
        self._cursor = 0

    def next_batch(self) -> Dataset:
        if self._cursor + self._batch_size > len(self._order):
            self._order = self._rng.permutation(len(self._dataset))
            self._cursor = 0
        indices = self._order[self._cursor:self._cursor + self._batch_size]
        self._cursor += self._batch_size
        return self._dataset.subset(indices)

    def __iter__(self) -> Iterator[Dataset]:
        while True:
            yield self.next_batch()
