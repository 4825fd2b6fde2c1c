"""
Testing utilities for the mixed-precision engine.

Small QuantizedModel implementations with closed-form losses and an
in-memory report output target, shared by the unit tests.
"""

from .mocks import (
    ActivationProbeModel,
    ConstantPredictor,
    LogisticRegressionModel,
    QuadraticModel,
    RecordingReportWriter,
    ScaledChainModel,
)

__all__ = [
    "ActivationProbeModel",
    "ConstantPredictor",
    "LogisticRegressionModel",
    "QuadraticModel",
    "RecordingReportWriter",
    "ScaledChainModel",
]
