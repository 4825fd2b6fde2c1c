"""
Phase Tracker Interface

Abstract base class for tracking the phase of a training run and
providing event hooks to observers.
"""

from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, List, Optional

from .phase_transition import PhaseTransition
from .training_phase import TrainingPhase


class PhaseTracker(ABC):
    """
    Abstract base class for phase tracking.

    This interface defines the contract for moving a training run between
    phases and notifying listeners of every change.
    """

    @abstractmethod
    def get_current_phase(self) -> TrainingPhase:
        """
        Get the current phase of the run.

        Returns:
            TrainingPhase: Current phase
        """
        pass

    @abstractmethod
    def set_phase(
        self, new_phase: TrainingPhase, iteration: int, metadata: Optional[Dict[str, Any]] = None
    ) -> bool:
        """
        Move the run to a new phase.

        Args:
            new_phase: The phase to transition to
            iteration: Training iteration at which the change happens
            metadata: Optional metadata about the change

        Returns:
            bool: True if the transition was valid and applied
        """
        pass

    @abstractmethod
    def can_transition_to(self, new_phase: TrainingPhase) -> bool:
        pass

    @abstractmethod
    def register_phase_listener(self, listener: Callable[[PhaseTransition], None]) -> None:
        """
        Register a listener for phase changes.

        Args:
            listener: Function to call when the phase changes
                     Signature: listener(transition: PhaseTransition) -> None
        """
        pass

    @abstractmethod
    def unregister_phase_listener(self, listener: Callable[[PhaseTransition], None]) -> None:
        pass

    @abstractmethod
    def get_phase_history(self, limit: Optional[int] = None) -> List[PhaseTransition]:
        """
        Get history of phase transitions.

        Args:
            limit: Maximum number of transitions to return

        Returns:
            List[PhaseTransition]: Most recent transitions, oldest first
        """
        pass

    @abstractmethod
    def reset_phase(self) -> None:
        pass
