"""
Basic Phase Tracker Implementation

Validated phase transitions with history and listener notification.
"""

import logging
from typing import Any, Callable, Dict, List, Optional

from .phase_tracker import PhaseTracker
from .phase_transition import PhaseTransition
from .training_phase import TrainingPhase

logger = logging.getLogger(__name__)


class BasicPhaseTracker(PhaseTracker):
    """
    Basic implementation of PhaseTracker.

    A run goes IDLE -> MIXED_PRECISION -> FINE_TUNING -> FINISHED; a run with
    no mixed-precision iterations may go straight to FINE_TUNING, and any
    unfinished run may be ABORTED.
    """

    def __init__(self, initial_phase: TrainingPhase = TrainingPhase.IDLE):
        self._initial_phase = initial_phase
        self._current_phase = initial_phase
        # Listeners keep registration order so notification is reproducible.
        self._listeners: List[Callable[[PhaseTransition], None]] = []
        self._history: List[PhaseTransition] = []

        self._valid_transitions = {
            TrainingPhase.IDLE: {
                TrainingPhase.MIXED_PRECISION,
                TrainingPhase.FINE_TUNING,
                TrainingPhase.ABORTED,
            },
            TrainingPhase.MIXED_PRECISION: {
                TrainingPhase.FINE_TUNING,
                TrainingPhase.FINISHED,
                TrainingPhase.ABORTED,
            },
            TrainingPhase.FINE_TUNING: {
                TrainingPhase.FINISHED,
                TrainingPhase.ABORTED,
            },
            TrainingPhase.FINISHED: set(),
            TrainingPhase.ABORTED: set(),
        }

    def get_current_phase(self) -> TrainingPhase:
        return self._current_phase

    def set_phase(
        self, new_phase: TrainingPhase, iteration: int, metadata: Optional[Dict[str, Any]] = None
    ) -> bool:
        if not self.can_transition_to(new_phase):
            logger.warning(
                "[PhaseTracker] rejected transition %s -> %s at iteration %d",
                self._current_phase.value, new_phase.value, iteration,
            )
            return False

        transition = PhaseTransition(self._current_phase, new_phase, iteration, dict(metadata or {}))
        self._current_phase = new_phase
        self._history.append(transition)
        self._notify_listeners(transition)
        return True

    def can_transition_to(self, new_phase: TrainingPhase) -> bool:
        return new_phase in self._valid_transitions.get(self._current_phase, set())

    def register_phase_listener(self, listener: Callable[[PhaseTransition], None]) -> None:
        if listener not in self._listeners:
            self._listeners.append(listener)

    def unregister_phase_listener(self, listener: Callable[[PhaseTransition], None]) -> None:
        if listener in self._listeners:
            self._listeners.remove(listener)

    def get_phase_history(self, limit: Optional[int] = None) -> List[PhaseTransition]:
        if limit is None:
            return self._history.copy()
        return self._history[-limit:] if limit > 0 else []

    def reset_phase(self) -> None:
        self._current_phase = self._initial_phase
        self._history.clear()

    def _notify_listeners(self, transition: PhaseTransition) -> None:
        for listener in list(self._listeners):
            try:
                listener(transition)
            except Exception as e:
                logger.error("[PhaseTracker] Error in phase listener: %s", e)
