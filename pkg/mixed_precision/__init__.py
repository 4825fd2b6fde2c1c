"""
Mixed Precision package - sensitivity-driven bitwidth allocation during
quantization-aware training.
"""

__version__ = "1.0.0"

from .errors import (
    ConfigError,
    ConstraintError,
    ContractError,
    DimensionError,
    FormatError,
    GuardError,
    MixedPrecisionError,
    NumericError,
    TrainingAborted,
)
from .allocator import (
    AllocationProblem,
    AllocatorFactory,
    AvgBitwidth,
    BitAllocation,
    BitAllocator,
    BruteForceAllocator,
    FractionalAllocator,
    GreedyIntegerAllocator,
    PerElementAvg,
    ResourceConstraint,
    RoundedFractionalAllocator,
    brute_force,
    constraint_from_dict,
    fractional_solve,
    greedy_integer,
    objective,
    round_to_integer,
)
from .data import BatchSampler, Dataset
from .quantsim import QuantizationMode, QuantizerConfig, QuantizerRole, QuantizerState
from .sensitivity import SensitivityEstimator, SensitivitySnapshot, hessian_diag_fd
from .engine import (
    ModelSpec,
    QuantizationAwareTrainer,
    QuantizedMLP,
    RunReport,
    TrainConfig,
    compare,
    fixed_precision_baseline,
    schedule_sweep,
    train,
)
from .io import (
    DatasetSelector,
    FileReportOutputTarget,
    gen_synthetic,
    load_idx,
    read_sensitivity_json,
    write_comparison_json,
    write_outputs,
    write_sensitivity_json,
)
from .configuration_loader import ConfigurationLoader
from .config import Config, load_config, parse_config

# Export interfaces for decoupling and modularity
from .interfaces import (
    BasicPhaseTracker,
    PhaseTracker,
    PhaseTransition,
    ProbeResult,
    QuantizedModel,
    ReportDispatcher,
    ReportOutputTarget,
    TrainingPhase,
)

__all__ = [
    "ConfigError",
    "ConstraintError",
    "ContractError",
    "DimensionError",
    "FormatError",
    "GuardError",
    "MixedPrecisionError",
    "NumericError",
    "TrainingAborted",
    "AllocationProblem",
    "AllocatorFactory",
    "AvgBitwidth",
    "BitAllocation",
    "BitAllocator",
    "BruteForceAllocator",
    "FractionalAllocator",
    "GreedyIntegerAllocator",
    "PerElementAvg",
    "ResourceConstraint",
    "RoundedFractionalAllocator",
    "brute_force",
    "constraint_from_dict",
    "fractional_solve",
    "greedy_integer",
    "objective",
    "round_to_integer",
    "BatchSampler",
    "Dataset",
    "QuantizationMode",
    "QuantizerConfig",
    "QuantizerRole",
    "QuantizerState",
    "SensitivityEstimator",
    "SensitivitySnapshot",
    "hessian_diag_fd",
    "ModelSpec",
    "QuantizationAwareTrainer",
    "QuantizedMLP",
    "RunReport",
    "TrainConfig",
    "compare",
    "fixed_precision_baseline",
    "schedule_sweep",
    "train",
    "DatasetSelector",
    "FileReportOutputTarget",
    "gen_synthetic",
    "load_idx",
    "read_sensitivity_json",
    "write_comparison_json",
    "write_outputs",
    "write_sensitivity_json",
    "ConfigurationLoader",
    "Config",
    "load_config",
    "parse_config",
    # Interfaces
    "BasicPhaseTracker",
    "PhaseTracker",
    "PhaseTransition",
    "ProbeResult",
    "QuantizedModel",
    "ReportDispatcher",
    "ReportOutputTarget",
    "TrainingPhase",
]
