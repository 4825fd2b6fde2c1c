"""
Exhaustive integer search, the reference optimum for small problems.
"""

import itertools

import numpy as np

from ..errors import ConstraintError, GuardError
from .base import BitAllocator
from .constraints import ResourceConstraint
from .problem import AllocationProblem, BitAllocation, quantization_term

MAX_QUANTIZERS = 6
MAX_BIT_SPAN = 6


def brute_force(problem: AllocationProblem, constraint: ResourceConstraint) -> BitAllocation:
    """
    Enumerate every integer allocation in the box in lexicographic order and
    keep the first one with the smallest objective.

    Raises:
        GuardError: If K > 6 or b_max - b_min > 6
    """
    span = constraint.b_max - constraint.b_min
    if problem.size > MAX_QUANTIZERS or span > MAX_BIT_SPAN:
        raise GuardError(
            f"search space too large: K={problem.size} (max {MAX_QUANTIZERS}), "
            f"b_max - b_min={span} (max {MAX_BIT_SPAN})"
        )
    weights = problem.weight_array()
    groups = constraint.groups(problem)
    best_bits = None
    best_value = np.inf
    for candidate in itertools.product(range(constraint.b_min, constraint.b_max + 1), repeat=problem.size):
        bits = np.array(candidate, dtype=np.float64)
        if any(group.usage(bits) > group.budget + group.slack() for group in groups):
            continue
        value = float(np.sum(quantization_term(weights, bits)))
        if value < best_value:
            best_value, best_bits = value, bits
    if best_bits is None:
        raise ConstraintError("no integer allocation in the box satisfies the constraint")
    return BitAllocation.from_array(problem.quantizer_ids, best_bits, integral=True)


class BruteForceAllocator(BitAllocator):
    """Exhaustive search; refuses problems beyond the size guard."""

    name = "brute"

    @property
    def produces_integers(self) -> bool:
        return True

    def allocate(self, problem: AllocationProblem, constraint: ResourceConstraint) -> BitAllocation:
        return brute_force(problem, constraint)
