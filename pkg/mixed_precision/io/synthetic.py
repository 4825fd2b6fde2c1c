"""
Deterministic two-dimensional toy datasets.
"""

import logging

import numpy as np

from ..data.dataset import Dataset
from ..errors import ContractError

logger = logging.getLogger(__name__)

TWO_MOONS = "two_moons"
BLOBS = "blobs"
SYNTHETIC_KINDS = (TWO_MOONS, BLOBS)


def make_two_moons(n: int, noise: float, rng: np.random.Generator) -> Dataset:
    """
    Two interleaved unit half-circles: the upper one centred at (0, 0), the
    lower one at (1, 0.5).
    """
    upper = n - n // 2
    lower = n // 2
    upper_angles = np.linspace(0.0, np.pi, upper)
    lower_angles = np.linspace(0.0, np.pi, lower)
    points = np.vstack([
        np.column_stack([np.cos(upper_angles), np.sin(upper_angles)]),
        np.column_stack([1.0 - np.cos(lower_angles), 0.5 - np.sin(lower_angles)]),
    ])
    labels = np.concatenate([np.zeros(upper, dtype=np.int64), np.ones(lower, dtype=np.int64)])
    if noise > 0:
        points = points + rng.normal(0.0, noise, size=points.shape)
    return Dataset(points, labels, num_classes=2)


def make_blobs(n: int, noise: float, rng: np.random.Generator, centers: int = 3, spread: float = 4.0) -> Dataset:
    """Isotropic Gaussian clusters whose means sit evenly on a circle of radius ``spread``."""
    if centers < 2:
        raise ContractError(f"blobs need at least two centers, got {centers}")
    angles = 2.0 * np.pi * np.arange(centers) / centers
    means = spread * np.column_stack([np.cos(angles), np.sin(angles)])
    labels = np.arange(n, dtype=np.int64) % centers
    points = means[labels] + rng.normal(0.0, noise, size=(n, 2)) if noise > 0 else means[labels]
    return Dataset(points, labels, num_classes=centers)


def gen_synthetic(
    kind: str,
    n: int,
    noise: float,
    seed: int,
    centers: int = 3,
    spread: float = 4.0,
) -> Dataset:
    """
    Labeled 2-D dataset, shuffled; identical for identical arguments.
    """
    if n < 2:
        raise ContractError(f"need at least 2 samples, got {n}")
    if noise < 0:
        raise ContractError(f"noise must be non-negative, got {noise}")
    rng = np.random.default_rng(seed)
    if kind == TWO_MOONS:
        dataset = make_two_moons(n, noise, rng)
    elif kind == BLOBS:
        dataset = make_blobs(n, noise, rng, centers, spread)
    else:
        raise ContractError(f"unknown synthetic dataset {kind!r}, expected one of {SYNTHETIC_KINDS}")
    order = rng.permutation(n)
    logger.debug("[Synthetic] generated %d %s samples (noise %.3g, seed %d)", n, kind, noise, seed)
    return dataset.subset(order)
