"""
Bit allocation: the constrained minimization of sum_q A_q / (2^b_q - 1)^2.
"""

from .base import BitAllocator
from .brute_force import BruteForceAllocator, brute_force
from .constraints import (
    BUDGET_TOLERANCE,
    AvgBitwidth,
    ConstraintGroup,
    PerElementAvg,
    ResourceConstraint,
    constraint_from_dict,
)
from .factory import AllocatorFactory
from .fractional import FractionalAllocator, fractional_solve, kkt_residuals
from .greedy import LITERAL, MARGINAL_GAIN, GreedyIntegerAllocator, greedy_integer
from .problem import (
    ACTIVATION_ROLE,
    WEIGHT_ROLE,
    AllocationProblem,
    BitAllocation,
    marginal_gain,
    objective,
    quantization_term,
)
from .rounding import RoundedFractionalAllocator, round_to_integer

__all__ = [
    "BitAllocator",
    "BruteForceAllocator",
    "brute_force",
    "BUDGET_TOLERANCE",
    "AvgBitwidth",
    "ConstraintGroup",
    "PerElementAvg",
    "ResourceConstraint",
    "constraint_from_dict",
    "AllocatorFactory",
    "FractionalAllocator",
    "fractional_solve",
    "kkt_residuals",
    "LITERAL",
    "MARGINAL_GAIN",
    "GreedyIntegerAllocator",
    "greedy_integer",
    "ACTIVATION_ROLE",
    "WEIGHT_ROLE",
    "AllocationProblem",
    "BitAllocation",
    "marginal_gain",
    "objective",
    "quantization_term",
    "RoundedFractionalAllocator",
    "round_to_integer",
]
