"""
Interface definitions for the mixed-precision engine.

This package contains the abstract contracts between the training loop and
the components around it: quantized models, phase tracking and report output.
"""

from .quantized_model import ProbeResult, QuantizedModel
from .training_phase import BasicPhaseTracker, PhaseTracker, PhaseTransition, TrainingPhase
from .report_output import ReportDispatcher, ReportOutputTarget

__all__ = [
    "ProbeResult",
    "QuantizedModel",
    "BasicPhaseTracker",
    "PhaseTracker",
    "PhaseTransition",
    "TrainingPhase",
    "ReportDispatcher",
    "ReportOutputTarget",
]
