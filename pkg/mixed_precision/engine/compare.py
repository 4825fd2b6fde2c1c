"""
Side-by-side runs sharing one seed: mixed precision, fixed precision at the
budget, allocate-once, and an optional sweep over phase-1 fractions.
"""

import logging
import math
from typing import Dict, Optional, Sequence

from ..allocator import AvgBitwidth, PerElementAvg, ResourceConstraint
from ..data.dataset import Dataset
from ..errors import ContractError
from .model import ModelSpec
from .report import RunReport
from .train_config import TrainConfig
from .trainer import QuantizationAwareTrainer, schedule_sweep

logger = logging.getLogger(__name__)

DEFAULT_SCHEDULES = (0.0, 0.5)


def fixed_bitwidth_for(constraint: ResourceConstraint) -> int:
    """Largest uniform bitwidth that satisfies ``constraint``."""
    if isinstance(constraint, AvgBitwidth):
        target = constraint.target
    elif isinstance(constraint, PerElementAvg):
        target = min(constraint.weight_target, constraint.activation_target)
    else:
        raise ContractError(f"no uniform bitwidth rule for constraint kind {constraint.kind!r}")
    return max(constraint.b_min, int(math.floor(target + 1e-9)))


def compare(
    spec: ModelSpec,
    config: TrainConfig,
    dataset: Dataset,
    test_set: Optional[Dataset] = None,
    schedules: Sequence[float] = DEFAULT_SCHEDULES,
) -> Dict[str, RunReport]:
    reports: Dict[str, RunReport] = {}
    reports["mixed_precision"] = QuantizationAwareTrainer(spec, config).train(dataset, test_set)

    bitwidth = fixed_bitwidth_for(config.constraint)
    fixed = QuantizationAwareTrainer(spec, config).train_fixed(dataset, bitwidth, test_set)
    reports[fixed.label] = fixed

    reports["allocate_once"] = QuantizationAwareTrainer(spec, config.with_schedule(0.0)).train(
        dataset, test_set, label="allocate_once"
    )
    for report in schedule_sweep(spec, config, list(schedules), dataset, test_set):
        reports[report.label] = report

    for label, report in reports.items():
        logger.info("[Compare] %-16s accuracy %.4f", label, report.final_accuracy)
    return reports
