"""
Dataset selection from a run configuration.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from ..data.dataset import Dataset
from ..errors import ConfigError
from .idx import load_idx
from .synthetic import BLOBS, SYNTHETIC_KINDS, TWO_MOONS, gen_synthetic

IDX = "idx"
DATASET_KINDS = SYNTHETIC_KINDS + (IDX,)


@dataclass(frozen=True)
class DatasetSelector:
    """
    Either a synthetic generator (``two_moons`` / ``blobs``) or IDX files.
    Without dedicated test files a ``test_fraction`` of the data is held out.
    """

    kind: str = TWO_MOONS
    n: int = 1000
    noise: float = 0.1
    seed: int = 0
    centers: int = 3
    spread: float = 4.0
    images: Optional[str] = None
    labels: Optional[str] = None
    test_images: Optional[str] = None
    test_labels: Optional[str] = None
    test_fraction: float = 0.2

    def __post_init__(self):
        if self.kind not in DATASET_KINDS:
            raise ConfigError(f"unknown dataset kind {self.kind!r}, expected one of {DATASET_KINDS}", "dataset.kind")
        if self.kind == IDX and (not self.images or not self.labels):
            raise ConfigError("idx datasets need both files", "dataset.images, dataset.labels")
        if (self.test_images is None) != (self.test_labels is None):
            raise ConfigError("give both test files or neither", "dataset.test_images, dataset.test_labels")
        if self.kind in SYNTHETIC_KINDS and self.n < 2:
            raise ConfigError(f"must be at least 2, got {self.n}", "dataset.n")
        if self.noise < 0:
            raise ConfigError(f"must be non-negative, got {self.noise}", "dataset.noise")
        if self.kind == BLOBS and self.centers < 2:
            raise ConfigError(f"must be at least 2, got {self.centers}", "dataset.centers")
        if not 0.0 <= self.test_fraction < 1.0:
            raise ConfigError(f"must lie in [0, 1), got {self.test_fraction}", "dataset.test_fraction")

    def load(self) -> Tuple[Dataset, Optional[Dataset]]:
        """
        Returns:
            Tuple[Dataset, Optional[Dataset]]: Training data and held-out data
            (``None`` when nothing is held out)
        """
        if self.kind == IDX:
            data = load_idx(self.images, self.labels)
            if self.test_images is not None:
                return data, load_idx(self.test_images, self.test_labels)
        else:
            data = gen_synthetic(self.kind, self.n, self.noise, self.seed, self.centers, self.spread)
        if self.test_fraction == 0.0:
            return data, None
        return data.split(self.test_fraction, self.seed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "n": self.n,
            "noise": self.noise,
            "seed": self.seed,
            "centers": self.centers,
            "spread": self.spread,
            "images": self.images,
            "labels": self.labels,
            "test_images": self.test_images,
            "test_labels": self.test_labels,
            "test_fraction": self.test_fraction,
        }
