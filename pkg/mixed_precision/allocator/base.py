"""
Base class for bit allocators.
"""

from abc import ABC, abstractmethod

from .constraints import ResourceConstraint
from .problem import AllocationProblem, BitAllocation


class BitAllocator(ABC):
    """Abstract base class for solvers of the constrained bitwidth problem."""

    name = "allocator"

    @abstractmethod
    def allocate(self, problem: AllocationProblem, constraint: ResourceConstraint) -> BitAllocation:
        """
        Solve for per-quantizer bitwidths.

        Args:
            problem: Objective weights of every quantizer
            constraint: Budget the result must satisfy

        Returns:
            BitAllocation: Allocation over the problem's quantizers, in order
        """
        pass

    @property
    @abstractmethod
    def produces_integers(self) -> bool:
        """
        Check whether allocations from this solver are always integral.

        Returns:
            bool: True for integer solvers
        """
        pass
