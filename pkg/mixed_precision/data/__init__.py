"""
Datasets and mini-batch sampling.
"""

from .dataset import BatchSampler, Dataset

__all__ = ["BatchSampler", "Dataset"]
