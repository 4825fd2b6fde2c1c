"""
Finite-difference Hessian diagonal, the curvature oracle FIT is checked against.
"""

from typing import Any, Callable, Optional

import numpy as np

from ..autodiff import Tensor, tape_gradient
from ..errors import ContractError, NumericError
from ..interfaces.quantized_model import QuantizedModel


def default_epsilon(theta: np.ndarray) -> np.ndarray:
    """Per-coordinate step 1e-3 * (1 + |theta_i|)."""
    return 1e-3 * (1.0 + np.abs(theta))


def hessian_diagonal(
    loss_fn: Callable[[Tensor], Tensor],
    point: np.ndarray,
    epsilon: Optional[float] = None,
) -> np.ndarray:
    """
    Central difference of the tape gradient along each coordinate:
    h_i = [g_i(theta + eps e_i) - g_i(theta - eps e_i)] / (2 eps).
    """
    theta = np.asarray(point, dtype=np.float64).reshape(-1).copy()
    if epsilon is not None and epsilon <= 0:
        raise ContractError(f"epsilon must be positive, got {epsilon}")
    steps = default_epsilon(theta) if epsilon is None else np.full(theta.shape, float(epsilon))

    diagonal = np.zeros_like(theta)
    for index in range(theta.size):
        original = theta[index]
        theta[index] = original + steps[index]
        upper = tape_gradient(loss_fn, Tensor(theta)).reshape(-1)[index]
        theta[index] = original - steps[index]
        lower = tape_gradient(loss_fn, Tensor(theta)).reshape(-1)[index]
        theta[index] = original
        diagonal[index] = (upper - lower) / (2.0 * steps[index])
    if not np.all(np.isfinite(diagonal)):
        raise NumericError("non-finite value in finite-difference Hessian diagonal")
    return diagonal


def hessian_diag_fd(model: QuantizedModel, batch: Any, epsilon: Optional[float] = None) -> np.ndarray:
    """Hessian diagonal of the model's full-precision loss on ``batch``."""
    return hessian_diagonal(model.loss_fn(batch), model.flat_parameters(), epsilon)
