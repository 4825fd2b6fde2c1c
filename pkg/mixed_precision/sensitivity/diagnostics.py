"""
Agreement between FIT sensitivities and the finite-difference Hessian diagonal.
"""

from typing import Any, Dict, Optional

import numpy as np
from scipy import stats

from ..errors import ContractError
from ..interfaces.quantized_model import QuantizedModel
from .estimator import SensitivityEstimator
from .hessian import hessian_diag_fd


def rank_correlation(first: np.ndarray, second: np.ndarray) -> float:
    """Spearman rank correlation of two equally sized vectors."""
    first = np.asarray(first, dtype=np.float64).reshape(-1)
    second = np.asarray(second, dtype=np.float64).reshape(-1)
    if first.shape != second.shape or first.size < 2:
        raise ContractError("rank correlation needs two vectors of equal length >= 2")
    correlation, _ = stats.spearmanr(first, second)
    return float(correlation)


def fit_hessian_agreement(
    estimator: SensitivityEstimator,
    model: QuantizedModel,
    batch: Any,
    epsilon: Optional[float] = None,
) -> Dict[str, float]:
    """
    Spearman correlation between per-parameter FIT and the Hessian diagonal,
    per weight quantizer and pooled over all of them (key ``"all"``).
    """
    diagonal = hessian_diag_fd(model, batch, epsilon)
    pooled_fit, pooled_hessian = [], []
    agreement: Dict[str, float] = {}
    for quantizer_id, where in model.weight_slices().items():
        fit = estimator.value(quantizer_id).reshape(-1)
        curvature = diagonal[where]
        pooled_fit.append(fit)
        pooled_hessian.append(curvature)
        if fit.size >= 2:
            agreement[quantizer_id] = rank_correlation(fit, curvature)
    agreement["all"] = rank_correlation(np.concatenate(pooled_fit), np.concatenate(pooled_hessian))
    return agreement
