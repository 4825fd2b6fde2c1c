"""
Resource constraints on a bit allocation.

Both variants reduce to one or more independent groups of the form
``sum_{q in group} w_q * b_q <= W`` inside the box [b_min, b_max].
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from ..errors import ConstraintError
from ..quantsim import DEFAULT_B_MAX, DEFAULT_B_MIN
from .problem import ACTIVATION_ROLE, WEIGHT_ROLE, AllocationProblem, BitAllocation

# Slack for comparing float budgets that are integral in exact arithmetic.
BUDGET_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ConstraintGroup:
    """``sum(costs * b[indices]) <= budget``."""

    name: str
    indices: Tuple[int, ...]
    costs: Tuple[float, ...]
    budget: float

    def usage(self, bits: np.ndarray) -> float:
        return float(np.dot(np.array(self.costs), bits[list(self.indices)]))

    def slack(self) -> float:
        return BUDGET_TOLERANCE * max(1.0, abs(self.budget))


class ResourceConstraint(ABC):
    """Abstract base class for bitwidth budgets."""

    b_min: int
    b_max: int

    @property
    @abstractmethod
    def kind(self) -> str:
        pass

    @abstractmethod
    def groups(self, problem: AllocationProblem) -> List[ConstraintGroup]:
        """
        Split the problem into independently constrained groups.

        Returns:
            List[ConstraintGroup]: Non-empty groups only
        """
        pass

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    def _check_target(self, name: str, target: float) -> None:
        if self.b_min < 1:
            raise ConstraintError(f"b_min must be at least 1, got {self.b_min}")
        if self.b_max < self.b_min:
            raise ConstraintError(f"b_max ({self.b_max}) is below b_min ({self.b_min})")
        if not self.b_min <= target <= self.b_max:
            raise ConstraintError(
                f"{name}={target} outside [b_min={self.b_min}, b_max={self.b_max}]"
            )

    def violation(self, alloc: BitAllocation, problem: AllocationProblem) -> float:
        """Largest budget overrun over all groups (0 when satisfied)."""
        bits = alloc.as_array()
        overrun = 0.0
        for group in self.groups(problem):
            overrun = max(overrun, group.usage(bits) - group.budget)
        box = max(0.0, float(np.max(self.b_min - bits)), float(np.max(bits - self.b_max)))
        return max(overrun, box)

    def is_satisfied(self, alloc: BitAllocation, problem: AllocationProblem, rel_tol: float = 0.0) -> bool:
        bits = alloc.as_array()
        if np.any(bits < self.b_min) or np.any(bits > self.b_max):
            return False
        for group in self.groups(problem):
            allowed = group.budget + max(group.slack(), rel_tol * abs(group.budget))
            if group.usage(bits) > allowed:
                return False
        return True


@dataclass(frozen=True)
class AvgBitwidth(ResourceConstraint):
    """Mean bitwidth over all quantizers at most ``target``."""

    target: float
    b_min: int = DEFAULT_B_MIN
    b_max: int = DEFAULT_B_MAX

    def __post_init__(self):
        self._check_target("target", self.target)

    @property
    def kind(self) -> str:
        return "avg_bitwidth"

    def groups(self, problem: AllocationProblem) -> List[ConstraintGroup]:
        size = problem.size
        return [ConstraintGroup("all", tuple(range(size)), (1.0,) * size, self.target * size)]

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "beta": self.target, "b_min": self.b_min, "b_max": self.b_max}


@dataclass(frozen=True)
class PerElementAvg(ResourceConstraint):
    """
    Element-weighted mean bitwidth, separately for weight and activation
    quantizers: sum(e_q b_q) / sum(e_q) <= target of the group.
    """

    weight_target: float
    activation_target: float
    b_min: int = DEFAULT_B_MIN
    b_max: int = DEFAULT_B_MAX

    def __post_init__(self):
        self._check_target("weight_target", self.weight_target)
        self._check_target("activation_target", self.activation_target)

    @property
    def kind(self) -> str:
        return "per_element"

    def groups(self, problem: AllocationProblem) -> List[ConstraintGroup]:
        groups = []
        for role, target in ((WEIGHT_ROLE, self.weight_target), (ACTIVATION_ROLE, self.activation_target)):
            indices = tuple(i for i, r in enumerate(problem.roles) if r == role)
            if not indices:
                continue
            costs = tuple(float(problem.element_counts[i]) for i in indices)
            groups.append(ConstraintGroup(role, indices, costs, target * sum(costs)))
        return groups

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "beta_w": self.weight_target,
            "beta_a": self.activation_target,
            "b_min": self.b_min,
            "b_max": self.b_max,
        }


def constraint_from_dict(data: Dict[str, Any]) -> ResourceConstraint:
    """Inverse of ``ResourceConstraint.to_dict``."""
    kind = data.get("kind", "avg_bitwidth")
    b_min = int(data.get("b_min", DEFAULT_B_MIN))
    b_max = int(data.get("b_max", DEFAULT_B_MAX))
    if kind == "avg_bitwidth":
        return AvgBitwidth(float(data["beta"]), b_min, b_max)
    if kind == "per_element":
        return PerElementAvg(float(data["beta_w"]), float(data["beta_a"]), b_min, b_max)
    raise ConstraintError(f"unknown constraint kind {kind!r}")
