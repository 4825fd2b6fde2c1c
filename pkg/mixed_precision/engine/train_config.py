"""
Training hyper-parameters of a quantization-aware run.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict

from ..allocator import AllocatorFactory, AvgBitwidth, ResourceConstraint
from ..allocator.greedy import SELECTION_RULES
from ..errors import ConfigError
from ..quantsim import QuantizationMode
from ..sensitivity import DEFAULT_GAMMA, DEFAULT_UPDATE_PERIOD

DEFAULT_ITERATIONS = 2000
DEFAULT_REALLOCATION_PERIOD = 50
DEFAULT_PHASE1_FRACTION = 0.5


@dataclass(frozen=True)
class TrainConfig:
    """
    Two-phase schedule: the first ``phase1_fraction`` of the iterations trains
    with periodic bitwidth reallocation, the rest fine-tunes at frozen integer
    bitwidths in hard mode.
    """

    constraint: ResourceConstraint = field(default_factory=lambda: AvgBitwidth(4.0))
    iterations: int = DEFAULT_ITERATIONS
    phase1_fraction: float = DEFAULT_PHASE1_FRACTION
    reallocation_period: int = DEFAULT_REALLOCATION_PERIOD
    learning_rate: float = 0.05
    momentum: float = 0.9
    alpha_learning_rate: float = 0.01
    gamma: float = DEFAULT_GAMMA
    sensitivity_period: int = DEFAULT_UPDATE_PERIOD
    mode: QuantizationMode = QuantizationMode.HARD
    allocator: str = "greedy"
    selection: str = "marginal_gain"
    batch_size: int = 32
    seed: int = 0
    clip_sensitivities: bool = True
    separate_probe_batch: bool = False
    log_period: int = 10
    eval_period: int = 100

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError(f"must be positive, got {self.iterations}", "train.iterations")
        if not 0.0 <= self.phase1_fraction <= 1.0:
            raise ConfigError(f"must lie in [0, 1], got {self.phase1_fraction}", "train.phase1_fraction")
        if self.reallocation_period < 1:
            raise ConfigError(f"must be at least 1, got {self.reallocation_period}", "train.reallocation_period")
        if self.sensitivity_period < 1:
            raise ConfigError(f"must be at least 1, got {self.sensitivity_period}", "train.sensitivity_period")
        if self.reallocation_period < self.sensitivity_period:
            raise ConfigError(
                f"reallocation period {self.reallocation_period} is shorter than "
                f"sensitivity period {self.sensitivity_period}",
                "train.reallocation_period, train.sensitivity_period",
            )
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f"must lie in (0, 1], got {self.gamma}", "train.gamma")
        for key, value in (("learning_rate", self.learning_rate), ("alpha_learning_rate", self.alpha_learning_rate)):
            if value <= 0:
                raise ConfigError(f"must be positive, got {value}", f"train.{key}")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError(f"must lie in [0, 1), got {self.momentum}", "train.momentum")
        if self.batch_size < 1:
            raise ConfigError(f"must be positive, got {self.batch_size}", "train.batch_size")
        if self.allocator not in AllocatorFactory.get_available_allocators():
            raise ConfigError(
                f"unknown allocator {self.allocator!r}, expected one of "
                f"{AllocatorFactory.get_available_allocators()}",
                "train.allocator",
            )
        if self.selection not in SELECTION_RULES:
            raise ConfigError(f"unknown selection rule {self.selection!r}", "train.selection")
        if self.log_period < 1 or self.eval_period < 0:
            raise ConfigError("log_period must be >= 1 and eval_period >= 0", "train.log_period, train.eval_period")

    @property
    def phase1_iterations(self) -> int:
        return int(round(self.phase1_fraction * self.iterations))

    def with_schedule(self, phase1_fraction: float) -> "TrainConfig":
        return replace(self, phase1_fraction=phase1_fraction)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "constraint": self.constraint.to_dict(),
            "iterations": self.iterations,
            "phase1_fraction": self.phase1_fraction,
            "reallocation_period": self.reallocation_period,
            "learning_rate": self.learning_rate,
            "momentum": self.momentum,
            "alpha_learning_rate": self.alpha_learning_rate,
            "gamma": self.gamma,
            "sensitivity_period": self.sensitivity_period,
            "mode": self.mode.value,
            "allocator": self.allocator,
            "selection": self.selection,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "clip_sensitivities": self.clip_sensitivities,
            "separate_probe_batch": self.separate_probe_batch,
            "log_period": self.log_period,
            "eval_period": self.eval_period,
        }
