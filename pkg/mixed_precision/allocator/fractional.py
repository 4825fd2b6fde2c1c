"""
Fractional relaxation solved by dual bisection.

The objective is separable, convex and strictly decreasing in every b_q with
A_q > 0, so the budget of each group binds. For a multiplier lambda each
quantizer solves

    min_b  A_q (2^b - 1)^-2 + lambda * w_q * b     on [b_min, b_max]

by bisection on the stationarity equation; lambda itself is bisected until
the group's budget is used up to a relative residual of 1e-6.
"""

import logging
from typing import Dict, Tuple

import numpy as np

from ..errors import NumericError
from .base import BitAllocator
from .constraints import ConstraintGroup, ResourceConstraint
from .problem import AllocationProblem, BitAllocation, term_derivative

logger = logging.getLogger(__name__)

INNER_STEPS = 80
OUTER_ITERATIONS = 200
RELATIVE_RESIDUAL = 1e-6
MAX_BRACKET_DOUBLINGS = 2000


def _stationary_bits(weights: np.ndarray, costs: np.ndarray, multiplier: float, b_min: float, b_max: float) -> np.ndarray:
    """Minimizer of each 1-D Lagrangian subproblem for a given multiplier."""
    if multiplier == 0.0:
        return np.where(weights > 0, b_max, b_min).astype(np.float64)
    target = multiplier * costs
    # slope(b) = -d/db of the term; positive and decreasing in b.
    slope_low = -term_derivative(weights, np.full_like(weights, b_min))
    slope_high = -term_derivative(weights, np.full_like(weights, b_max))
    lo = np.full_like(weights, b_min, dtype=np.float64)
    hi = np.full_like(weights, b_max, dtype=np.float64)
    for _ in range(INNER_STEPS):
        mid = 0.5 * (lo + hi)
        above = -term_derivative(weights, mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    bits = 0.5 * (lo + hi)
    bits = np.where(slope_low <= target, b_min, bits)
    bits = np.where(slope_high >= target, b_max, bits)
    return bits


def solve_group(
    weights: np.ndarray, group: ConstraintGroup, b_min: float, b_max: float
) -> Tuple[np.ndarray, float]:
    """
    Fractional bits for one constraint group.

    Returns:
        Tuple[np.ndarray, float]: Bits of the group's quantizers and the multiplier
    """
    costs = np.array(group.costs, dtype=np.float64)
    budget = group.budget
    tolerance = RELATIVE_RESIDUAL * max(abs(budget), 1e-12)

    def usage(bits: np.ndarray) -> float:
        return float(np.dot(costs, bits))

    unconstrained = _stationary_bits(weights, costs, 0.0, b_min, b_max)
    if usage(unconstrained) <= budget:
        return unconstrained, 0.0

    lower, upper = 0.0, 1.0
    doublings = 0
    while usage(_stationary_bits(weights, costs, upper, b_min, b_max)) > budget:
        lower, upper = upper, upper * 2.0
        doublings += 1
        if doublings > MAX_BRACKET_DOUBLINGS:
            raise NumericError(f"group {group.name!r}: could not bracket the multiplier")

    bits = _stationary_bits(weights, costs, upper, b_min, b_max)
    for _ in range(OUTER_ITERATIONS):
        if budget - usage(bits) <= tolerance:
            return bits, upper
        middle = 0.5 * (lower + upper)
        candidate = _stationary_bits(weights, costs, middle, b_min, b_max)
        if usage(candidate) > budget:
            lower = middle
        else:
            upper, bits = middle, candidate
    residual = budget - usage(bits)
    if residual <= tolerance:
        return bits, upper
    raise NumericError(
        f"group {group.name!r}: dual bisection did not converge, "
        f"budget residual {residual:.3e} after {OUTER_ITERATIONS} iterations"
    )


def fractional_solve(problem: AllocationProblem, constraint: ResourceConstraint) -> BitAllocation:
    """Convex relaxation with real-valued bits, groups solved independently."""
    weights = problem.weight_array()
    bits = np.full(problem.size, float(constraint.b_min))
    multipliers: Dict[str, float] = {}
    for group in constraint.groups(problem):
        indices = list(group.indices)
        group_bits, multiplier = solve_group(weights[indices], group, constraint.b_min, constraint.b_max)
        bits[indices] = group_bits
        multipliers[group.name] = multiplier
    logger.debug("[FractionalAllocator] multipliers %s", multipliers)
    return BitAllocation.from_array(problem.quantizer_ids, bits, integral=False, multipliers=multipliers)


def kkt_residuals(
    alloc: BitAllocation, problem: AllocationProblem, constraint: ResourceConstraint, boundary_tol: float = 1e-9
) -> Dict[str, float]:
    """
    Optimality diagnostics of a fractional allocation.

    Returns:
        Dict[str, float]: ``stationarity`` is the largest |df/db_q + lambda w_q|
        over interior coordinates; ``boundary`` the largest wrongly signed
        residual at a box bound (0 when all bounds are consistent).
    """
    bits = alloc.as_array()
    weights = problem.weight_array()
    stationarity = 0.0
    boundary = 0.0
    for group in constraint.groups(problem):
        multiplier = alloc.multipliers.get(group.name, 0.0)
        for index, cost in zip(group.indices, group.costs):
            residual = float(term_derivative(weights[index], bits[index])) + multiplier * cost
            if bits[index] <= constraint.b_min + boundary_tol:
                boundary = max(boundary, -residual)
            elif bits[index] >= constraint.b_max - boundary_tol:
                boundary = max(boundary, residual)
            else:
                stationarity = max(stationarity, abs(residual))
    return {"stationarity": stationarity, "boundary": max(boundary, 0.0)}


class FractionalAllocator(BitAllocator):
    """Real-valued bitwidths from the convex relaxation."""

    name = "fractional"

    @property
    def produces_integers(self) -> bool:
        return False

    def allocate(self, problem: AllocationProblem, constraint: ResourceConstraint) -> BitAllocation:
        return fractional_solve(problem, constraint)
