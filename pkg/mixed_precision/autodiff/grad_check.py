"""
Finite-difference oracle for tape gradients.
"""

from typing import Callable

import numpy as np

from ..errors import ContractError, NumericError
from .tape import Tape, backward
from .tensor import Tensor


def _evaluate(fn: Callable[[Tensor], Tensor], values: np.ndarray) -> float:
    result = fn(Tensor(values))
    if not result.is_scalar():
        raise ContractError(f"grad_check needs a scalar function, got shape {result.shape}")
    value = result.item()
    if not np.isfinite(value):
        raise NumericError("non-finite loss at a perturbed point")
    return value


def tape_gradient(fn: Callable[[Tensor], Tensor], point: Tensor) -> np.ndarray:
    """Gradient of ``fn`` at ``point`` as computed by the tape."""
    with Tape():
        leaf = Tensor(point.data.copy(), requires_grad=True)
        loss = fn(leaf)
        backward(loss)
    if leaf.grad is None:
        return np.zeros_like(leaf.data)
    return leaf.grad


def finite_difference_gradient(
    fn: Callable[[Tensor], Tensor], point: Tensor, step: float = 1e-5
) -> np.ndarray:
    """Central differences with the step scaled by each coordinate's magnitude."""
    if step <= 0:
        raise ContractError(f"step must be positive, got {step}")
    base = point.data.astype(np.float64).copy()
    flat = base.reshape(-1)
    numeric = np.zeros_like(flat)
    for index in range(flat.size):
        h = step * max(1.0, abs(flat[index]))
        original = flat[index]
        flat[index] = original + h
        upper = _evaluate(fn, base)
        flat[index] = original - h
        lower = _evaluate(fn, base)
        flat[index] = original
        numeric[index] = (upper - lower) / (2.0 * h)
    return numeric.reshape(base.shape)


def grad_check(
    fn: Callable[[Tensor], Tensor],
    point: Tensor,
    step: float = 1e-5,
    abs_floor: float = 1e-6,
) -> float:
    """
    Compare tape gradients against central finite differences.

    ``fn`` must be deterministic (freeze any noise). Coordinates whose
    gradients are both below ``abs_floor`` are compared absolutely.

    Returns:
        float: Maximum relative error over all coordinates.
    """
    analytic = tape_gradient(fn, point)
    numeric = finite_difference_gradient(fn, point, step)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), abs_floor)
    return float(np.max(np.abs(analytic - numeric) / scale)) if scale.size else 0.0
