"""
Phase Transition Data Class

Represents a phase change of a training run with optional metadata.
"""

import time
from dataclasses import dataclass, field
from typing import Any, Dict

from .training_phase import TrainingPhase


@dataclass(frozen=True)
class PhaseTransition:
    """A phase change at a given training iteration."""

    from_phase: TrainingPhase
    to_phase: TrainingPhase
    iteration: int
    metadata: Dict[str, Any] = field(default_factory=dict)
    timestamp: float = field(default_factory=time.time, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "from": self.from_phase.value,
            "to": self.to_phase.value,
            "iteration": self.iteration,
            "metadata": dict(self.metadata),
        }
