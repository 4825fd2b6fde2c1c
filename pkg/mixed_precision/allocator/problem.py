"""
Bit allocation problem data and the separable objective

    f(b) = sum_q A_q / (2^{b_q} - 1)^2

where A_q folds a quantizer's sensitivity and squared range together.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..errors import ContractError
from ..sensitivity import SensitivitySnapshot

WEIGHT_ROLE = "weight"
ACTIVATION_ROLE = "activation"


def quantization_term(weight: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """Per-quantizer objective term A / (2^b - 1)^2."""
    levels = np.power(2.0, bits) - 1.0
    return weight / (levels * levels)


def marginal_gain(weight: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """Objective decrease of one extra bit: A [(2^b-1)^-2 - (2^(b+1)-1)^-2]."""
    return quantization_term(weight, bits) - quantization_term(weight, bits + 1.0)


def term_derivative(weight: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """d/db of A (2^b - 1)^-2, which is negative for A > 0."""
    power = np.power(2.0, bits)
    return -2.0 * np.log(2.0) * weight * power / (power - 1.0) ** 3


@dataclass(frozen=True)
class AllocationProblem:
    """Objective weights, roles and element counts of K quantizers."""

    quantizer_ids: Tuple[str, ...]
    weights: Tuple[float, ...]
    roles: Tuple[str, ...] = ()
    element_counts: Tuple[int, ...] = ()

    def __post_init__(self):
        size = len(self.quantizer_ids)
        if size < 1:
            raise ContractError("an allocation problem needs at least one quantizer")
        if len(set(self.quantizer_ids)) != size:
            raise ContractError("quantizer ids must be unique")
        if len(self.weights) != size:
            raise ContractError(f"{len(self.weights)} weights for {size} quantizers")
        if not self.roles:
            object.__setattr__(self, "roles", (WEIGHT_ROLE,) * size)
        if not self.element_counts:
            object.__setattr__(self, "element_counts", (1,) * size)
        if len(self.roles) != size or len(self.element_counts) != size:
            raise ContractError("roles and element counts must cover every quantizer")
        for quantizer_id, weight in zip(self.quantizer_ids, self.weights):
            if not np.isfinite(weight) or weight < 0:
                raise ContractError(f"{quantizer_id}: weight must be finite and >= 0, got {weight}")
        for quantizer_id, role in zip(self.quantizer_ids, self.roles):
            if role not in (WEIGHT_ROLE, ACTIVATION_ROLE):
                raise ContractError(f"{quantizer_id}: unknown role {role!r}")
        for quantizer_id, count in zip(self.quantizer_ids, self.element_counts):
            if count <= 0:
                raise ContractError(f"{quantizer_id}: element count must be positive")

    @classmethod
    def from_weights(
        cls,
        weights: Sequence[float],
        quantizer_ids: Optional[Sequence[str]] = None,
        roles: Optional[Sequence[str]] = None,
        element_counts: Optional[Sequence[int]] = None,
    ) -> "AllocationProblem":
        ids = tuple(quantizer_ids) if quantizer_ids is not None else tuple(f"q{i}" for i in range(len(weights)))
        return cls(
            ids,
            tuple(float(w) for w in weights),
            tuple(roles) if roles is not None else (),
            tuple(int(c) for c in element_counts) if element_counts is not None else (),
        )

    @classmethod
    def from_snapshot(cls, snapshot: SensitivitySnapshot) -> "AllocationProblem":
        ids = snapshot.quantizer_ids
        return cls(
            ids,
            tuple(float(snapshot.weights[q]) for q in ids),
            tuple(snapshot.roles.get(q, WEIGHT_ROLE) for q in ids),
            tuple(int(snapshot.element_counts[q]) for q in ids),
        )

    @property
    def size(self) -> int:
        return len(self.quantizer_ids)

    def weight_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=np.float64)

    def scaled(self, factor: float) -> "AllocationProblem":
        return AllocationProblem(
            self.quantizer_ids,
            tuple(w * factor for w in self.weights),
            self.roles,
            self.element_counts,
        )


@dataclass(frozen=True)
class BitAllocation:
    """Per-quantizer bitwidths; ``multipliers`` holds dual values per group."""

    quantizer_ids: Tuple[str, ...]
    bitwidths: Tuple[float, ...]
    integral: bool
    multipliers: Dict[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.bitwidths) != len(self.quantizer_ids):
            raise ContractError("one bitwidth per quantizer is required")
        object.__setattr__(self, "bitwidths", tuple(float(b) for b in self.bitwidths))
        if self.integral and not all(b.is_integer() for b in self.bitwidths):
            raise ContractError(f"integral allocation holds fractional bits {self.bitwidths}")

    @classmethod
    def from_array(
        cls,
        quantizer_ids: Sequence[str],
        bits: np.ndarray,
        integral: bool,
        multipliers: Optional[Dict[str, float]] = None,
    ) -> "BitAllocation":
        return cls(tuple(quantizer_ids), tuple(float(b) for b in bits), integral, dict(multipliers or {}))

    @classmethod
    def uniform(cls, quantizer_ids: Sequence[str], bitwidth: float) -> "BitAllocation":
        return cls(tuple(quantizer_ids), (float(bitwidth),) * len(quantizer_ids), float(bitwidth).is_integer())

    def as_array(self) -> np.ndarray:
        return np.array(self.bitwidths, dtype=np.float64)

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.quantizer_ids, self.bitwidths))

    @property
    def average_bits(self) -> float:
        return float(np.mean(self.bitwidths))

    def changed_from(self, other: Optional["BitAllocation"]) -> int:
        """Number of quantizers whose bitwidth differs from ``other``."""
        if other is None:
            return len(self.bitwidths)
        previous = other.as_dict()
        return sum(1 for q, b in self.as_dict().items() if previous.get(q) != b)


def objective(alloc: BitAllocation, problem: AllocationProblem) -> float:
    """Second-order loss proxy sum_q A_q / (2^{b_q} - 1)^2."""
    if tuple(alloc.quantizer_ids) != tuple(problem.quantizer_ids):
        raise ContractError(
            f"allocation covers {alloc.quantizer_ids}, problem covers {problem.quantizer_ids}"
        )
    return float(np.sum(quantization_term(problem.weight_array(), alloc.as_array())))
