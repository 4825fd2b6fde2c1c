"""
Allocator factory for solver selection by name.
"""

import logging
from typing import List

from ..errors import ConfigError
from .base import BitAllocator
from .brute_force import BruteForceAllocator
from .fractional import FractionalAllocator
from .greedy import MARGINAL_GAIN, GreedyIntegerAllocator
from .rounding import RoundedFractionalAllocator

logger = logging.getLogger(__name__)


class AllocatorFactory:
    """Factory for creating bit allocators from configuration names."""

    @staticmethod
    def create_allocator(name: str, selection: str = MARGINAL_GAIN) -> BitAllocator:
        """
        Create an allocator by name.

        Args:
            name: One of ``get_available_allocators()``
            selection: Greedy upgrade rule, ignored by the other solvers

        Returns:
            BitAllocator: A fresh solver instance
        """
        allocator_type = name.lower()
        if allocator_type == "greedy":
            return GreedyIntegerAllocator(selection)
        elif allocator_type == "fractional":
            return FractionalAllocator()
        elif allocator_type == "fractional_rounded":
            return RoundedFractionalAllocator()
        elif allocator_type == "brute":
            return BruteForceAllocator()
        logger.error("[AllocatorFactory] unknown allocator %r", name)
        raise ConfigError(
            f"unknown allocator {name!r}, expected one of {AllocatorFactory.get_available_allocators()}",
            "allocator",
        )

    @staticmethod
    def get_available_allocators() -> List[str]:
        return ["greedy", "fractional", "fractional_rounded", "brute"]
