"""
Plain SGD with heavy-ball momentum.
"""

from typing import Dict, List, Optional

import numpy as np

from ..autodiff import Tensor
from ..errors import ContractError, NumericError


def sgd_step(
    param: np.ndarray,
    grad: np.ndarray,
    velocity: np.ndarray,
    lr: float,
    momentum: float,
    floor: Optional[float] = None,
) -> None:
    """
    v <- momentum * v + g;  theta <- theta - lr * v, in place.

    With ``floor`` set, theta is clamped from below afterwards.
    """
    if param.shape != grad.shape or param.shape != velocity.shape:
        raise ContractError(f"shape mismatch: param {param.shape}, grad {grad.shape}, velocity {velocity.shape}")
    if not np.all(np.isfinite(grad)):
        raise NumericError("non-finite gradient in SGD step")
    velocity *= momentum
    velocity += grad
    param -= lr * velocity
    if floor is not None:
        np.maximum(param, floor, out=param)


class SGDOptimizer:
    """Momentum SGD over a fixed list of tensors, consuming their ``grad``."""

    def __init__(self, params: List[Tensor], lr: float, momentum: float = 0.0, floor: Optional[float] = None):
        self.params = list(params)
        self.lr = lr
        self.momentum = momentum
        self.floor = floor
        self._velocity: Dict[int, np.ndarray] = {id(p): np.zeros_like(p.data) for p in self.params}

    def step(self) -> None:
        # Check everything first so a bad gradient leaves all parameters untouched.
        for param in self.params:
            if param.grad is not None and not np.all(np.isfinite(param.grad)):
                raise NumericError(f"non-finite gradient for {param.name or 'parameter'}")
        for param in self.params:
            if param.grad is None:
                continue
            sgd_step(param.data, param.grad, self._velocity[id(param)], self.lr, self.momentum, self.floor)

    def zero_grad(self) -> None:
        for param in self.params:
            param.zero_grad()
