"""
Greedy integer bit assignment.

Starting from b_min everywhere, single-bit upgrades go to the quantizer with
the largest objective decrease per unit of budget until no upgrade fits.
Because each quantizer's marginal gain shrinks as its bitwidth grows, this is
exact for the average-bitwidth budget; with element-count costs it is a
knapsack heuristic.
"""

import heapq
import logging
from typing import List, Tuple

import numpy as np

from ..errors import ConstraintError, ContractError
from .base import BitAllocator
from .constraints import BUDGET_TOLERANCE, ConstraintGroup, ResourceConstraint
from .problem import AllocationProblem, BitAllocation, marginal_gain, quantization_term

logger = logging.getLogger(__name__)

MARGINAL_GAIN = "marginal_gain"
LITERAL = "literal"
SELECTION_RULES = (MARGINAL_GAIN, LITERAL)


def _priority(selection: str, weight: float, bits: float, cost: float, index: int) -> Tuple[float, float, int]:
    # Heap pops the smallest key: best score first, then lower bits, then lower index.
    if selection == LITERAL:
        score = float(quantization_term(np.float64(weight), np.float64(bits)))
    else:
        score = -float(marginal_gain(np.float64(weight), np.float64(bits))) / cost
    return score, bits, index


def greedy_fill(
    weights: np.ndarray,
    bits: np.ndarray,
    group: ConstraintGroup,
    budget: float,
    b_max: int,
    selection: str = MARGINAL_GAIN,
) -> float:
    """
    Spend ``budget`` on single-bit upgrades within ``group``, mutating ``bits``.

    Returns:
        float: Budget left over once no upgrade fits
    """
    if selection not in SELECTION_RULES:
        raise ContractError(f"unknown selection rule {selection!r}")
    costs = dict(zip(group.indices, group.costs))
    heap: List[Tuple[Tuple[float, float, int], int]] = []
    for index in group.indices:
        if bits[index] < b_max:
            heapq.heappush(heap, (_priority(selection, weights[index], bits[index], costs[index], index), index))

    remaining = budget
    while heap:
        _, index = heapq.heappop(heap)
        cost = costs[index]
        if cost > remaining + BUDGET_TOLERANCE * max(1.0, cost):
            # Budget only shrinks, so this quantizer can never be upgraded again.
            continue
        bits[index] += 1.0
        remaining -= cost
        if bits[index] < b_max:
            heapq.heappush(heap, (_priority(selection, weights[index], bits[index], cost, index), index))
    return remaining


def _greedy_budget(group: ConstraintGroup, b_min: int, b_max: int, size: int) -> float:
    floor_usage = b_min * sum(group.costs)
    budget = group.budget - floor_usage
    capacity = (b_max - b_min) * sum(group.costs)
    if budget < -group.slack():
        raise ConstraintError(f"group {group.name!r}: budget {group.budget} below the b_min floor {floor_usage}")
    if budget > capacity + group.slack():
        raise ConstraintError(
            f"group {group.name!r}: budget of {budget} extra bits exceeds the box capacity {capacity}"
        )
    if all(cost == 1.0 for cost in group.costs):
        whole = np.floor(budget + BUDGET_TOLERANCE * max(1.0, budget))
        if abs(whole - budget) > BUDGET_TOLERANCE * max(1.0, budget):
            logger.warning(
                "[GreedyIntegerAllocator] budget %.6g for %d quantizers is not integral; using %d bits",
                budget, size, int(whole),
            )
        budget = float(whole)
    return max(budget, 0.0)


class GreedyIntegerAllocator(BitAllocator):
    """Greedy single-bit upgrades; ``selection="literal"`` upgrades the smallest term."""

    name = "greedy"

    def __init__(self, selection: str = MARGINAL_GAIN):
        if selection not in SELECTION_RULES:
            raise ContractError(f"unknown selection rule {selection!r}, expected one of {SELECTION_RULES}")
        self.selection = selection

    @property
    def produces_integers(self) -> bool:
        return True

    def allocate(self, problem: AllocationProblem, constraint: ResourceConstraint) -> BitAllocation:
        weights = problem.weight_array()
        bits = np.full(problem.size, float(constraint.b_min))
        for group in constraint.groups(problem):
            budget = _greedy_budget(group, constraint.b_min, constraint.b_max, len(group.indices))
            greedy_fill(weights, bits, group, budget, constraint.b_max, self.selection)
        logger.debug("[GreedyIntegerAllocator] allocation %s", bits.tolist())
        return BitAllocation.from_array(problem.quantizer_ids, bits, integral=True)


def greedy_integer(
    problem: AllocationProblem,
    constraint: ResourceConstraint,
    selection: str = MARGINAL_GAIN,
) -> BitAllocation:
    """
    Integer allocation by greedy single-bit upgrades.

    Optimal for ``AvgBitwidth``. Under ``PerElementAvg`` upgrades cost their
    element counts and the result is only guaranteed feasible: an expensive
    upgrade with the best gain per element can crowd out cheaper ones, and on
    small problems the objective can be well above the ``brute_force``
    optimum. Use ``brute_force`` or the rounded relaxation when that matters.
    """
    return GreedyIntegerAllocator(selection).allocate(problem, constraint)
