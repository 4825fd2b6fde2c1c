"""
Quantization sensitivities: EMA-smoothed FIT statistics and curvature oracles.
"""

from .estimator import (
    DEFAULT_GAMMA,
    DEFAULT_UPDATE_PERIOD,
    SensitivityEstimator,
    SensitivitySnapshot,
)
from .hessian import default_epsilon, hessian_diag_fd, hessian_diagonal
from .diagnostics import fit_hessian_agreement, rank_correlation

__all__ = [
    "DEFAULT_GAMMA",
    "DEFAULT_UPDATE_PERIOD",
    "SensitivityEstimator",
    "SensitivitySnapshot",
    "default_epsilon",
    "hessian_diag_fd",
    "hessian_diagonal",
    "fit_hessian_agreement",
    "rank_correlation",
]
