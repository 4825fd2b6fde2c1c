"""
Run reports: the per-iteration trajectory and every allocation event.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..allocator import BitAllocation
from ..interfaces.training_phase import PhaseTransition
from ..sensitivity import SensitivitySnapshot

PHASE1_STAGE = "phase1"
BOUNDARY_STAGE = "phase_boundary"


@dataclass(frozen=True)
class QuantizerRecord:
    """State of one quantizer at a logged iteration."""

    role: str
    bitwidth: Optional[float]
    sensitivity: Optional[float]
    alpha_mean: float


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    phase: str
    loss: float
    accuracy: Optional[float] = None
    quantizers: Dict[str, QuantizerRecord] = field(default_factory=dict)

    @property
    def logged(self) -> bool:
        return bool(self.quantizers)


@dataclass(frozen=True)
class AllocationEvent:
    """
    One bitwidth reallocation. ``changed_bits`` counts quantizers whose
    bitwidth differs from the previous event.
    """

    iteration: int
    stage: str
    allocation: BitAllocation
    snapshot: Optional[SensitivitySnapshot]
    objective: float
    changed_bits: int


@dataclass
class RunReport:
    """Everything a training run produced; wall-clock time is ignored by ``==``."""

    label: str
    constraint: Optional[Dict[str, Any]] = None
    iterations: List[IterationRecord] = field(default_factory=list)
    allocation_events: List[AllocationEvent] = field(default_factory=list)
    final_allocation: Optional[BitAllocation] = None
    final_accuracy: Optional[float] = None
    phase_history: List[PhaseTransition] = field(default_factory=list)
    aborted: bool = False
    abort_reason: Optional[str] = None
    wall_clock: float = field(default=0.0, compare=False)

    @property
    def losses(self) -> List[float]:
        return [record.loss for record in self.iterations]

    @property
    def logged_iterations(self) -> List[IterationRecord]:
        return [record for record in self.iterations if record.logged]

    def summary(self) -> Dict[str, Any]:
        """Compact description used by the comparison output."""
        allocation = self.final_allocation
        return {
            "label": self.label,
            "final_accuracy": self.final_accuracy,
            "final_loss": self.iterations[-1].loss if self.iterations else None,
            "average_bits": allocation.average_bits if allocation is not None else None,
            "bitwidths": allocation.as_dict() if allocation is not None else None,
            "allocation_events": len(self.allocation_events),
            "aborted": self.aborted,
        }
