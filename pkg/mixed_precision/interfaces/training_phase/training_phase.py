"""
Training Phase Enumeration

Defines the phases a quantization-aware training run moves through.
"""

from enum import Enum


class TrainingPhase(Enum):
    """Enumeration of training run phases."""
    IDLE = "idle"
    MIXED_PRECISION = "mixed_precision"
    FINE_TUNING = "fine_tuning"
    FINISHED = "finished"
    ABORTED = "aborted"
