"""
Quantization-aware training engine: models, the two-phase training loop and
its baselines.
"""

from .model import ModelSpec, QuantizedMLP
from .optimizer import SGDOptimizer, sgd_step
from .report import AllocationEvent, IterationRecord, QuantizerRecord, RunReport
from .train_config import TrainConfig
from .trainer import (
    QuantizationAwareTrainer,
    evaluate,
    fixed_precision_baseline,
    schedule_sweep,
    train,
)
from .compare import DEFAULT_SCHEDULES, compare, fixed_bitwidth_for

__all__ = [
    "ModelSpec",
    "QuantizedMLP",
    "SGDOptimizer",
    "sgd_step",
    "AllocationEvent",
    "IterationRecord",
    "QuantizerRecord",
    "RunReport",
    "TrainConfig",
    "QuantizationAwareTrainer",
    "evaluate",
    "fixed_precision_baseline",
    "schedule_sweep",
    "train",
    "DEFAULT_SCHEDULES",
    "compare",
    "fixed_bitwidth_for",
]
