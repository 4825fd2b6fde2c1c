"""
Projection of a fractional allocation onto integer bitwidths.
"""

import logging

import numpy as np

from ..errors import ContractError
from .base import BitAllocator
from .constraints import BUDGET_TOLERANCE, ConstraintGroup, ResourceConstraint
from .fractional import fractional_solve
from .greedy import MARGINAL_GAIN, greedy_fill
from .problem import AllocationProblem, BitAllocation, quantization_term

logger = logging.getLogger(__name__)

# Bits this close below an integer are treated as that integer.
INTEGRALITY_TOLERANCE = 1e-9


def _repair_overrun(weights: np.ndarray, bits: np.ndarray, group: ConstraintGroup, b_min: int) -> None:
    """Drop single bits where it hurts least until the group fits its budget."""
    costs = dict(zip(group.indices, group.costs))
    while group.usage(bits) > group.budget + group.slack():
        candidates = [i for i in group.indices if bits[i] > b_min]
        if not candidates:
            raise ContractError(f"group {group.name!r} cannot meet its budget even at b_min")

        def loss_per_cost(i: int) -> float:
            increase = quantization_term(weights[i], bits[i] - 1.0) - quantization_term(weights[i], bits[i])
            return float(increase) / costs[i]

        worst = min(candidates, key=lambda i: (loss_per_cost(i), -bits[i], i))
        bits[worst] -= 1.0


def round_to_integer(
    frac: BitAllocation, problem: AllocationProblem, constraint: ResourceConstraint
) -> BitAllocation:
    """
    Floor every bitwidth (never below b_min) and hand the reclaimed budget back
    through greedy single-bit upgrades. No intermediate step violates the budget.
    """
    if tuple(frac.quantizer_ids) != tuple(problem.quantizer_ids):
        raise ContractError("fractional allocation and problem cover different quantizers")
    weights = problem.weight_array()
    bits = np.floor(frac.as_array() + INTEGRALITY_TOLERANCE)
    bits = np.clip(bits, constraint.b_min, constraint.b_max)
    for group in constraint.groups(problem):
        _repair_overrun(weights, bits, group, constraint.b_min)
        spare = group.budget - group.usage(bits)
        if spare >= min(group.costs) - BUDGET_TOLERANCE:
            greedy_fill(weights, bits, group, spare, constraint.b_max, MARGINAL_GAIN)
    logger.debug("[FractionalAllocator] rounded %s to %s", frac.bitwidths, bits.tolist())
    return BitAllocation.from_array(problem.quantizer_ids, bits, integral=True, multipliers=frac.multipliers)


class RoundedFractionalAllocator(BitAllocator):
    """Fractional relaxation followed by integer rounding."""

    name = "fractional_rounded"

    @property
    def produces_integers(self) -> bool:
        return True

    def allocate(self, problem: AllocationProblem, constraint: ResourceConstraint) -> BitAllocation:
        return round_to_integer(fractional_solve(problem, constraint), problem, constraint)
