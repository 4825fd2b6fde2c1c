"""
Training Phase Package

Phase tracking for two-phase quantization-aware training runs.
"""

from .training_phase import TrainingPhase
from .phase_transition import PhaseTransition
from .phase_tracker import PhaseTracker
from .basic_phase_tracker import BasicPhaseTracker

__all__ = [
    "TrainingPhase",
    "PhaseTransition",
    "PhaseTracker",
    "BasicPhaseTracker",
]
