"""
MSE range initialization.

The range is picked from a fixed grid of candidates ``c * max|x|`` with
``c`` in {0.01, 0.02, ..., 1.00}; the first candidate with the smallest
squared reconstruction error wins.
"""

import numpy as np

from ..autodiff import Tensor
from ..errors import ContractError
from .quantizer import quantize_values
from .quantizer_config import QuantizerConfig

ALPHA_FLOOR = 1e-8
CANDIDATE_FRACTIONS = np.arange(1, 101, dtype=np.float64) / 100.0


def _best_alpha(values: np.ndarray, bitwidth: float, signed: bool) -> float:
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        return ALPHA_FLOOR
    errors = [
        float(np.sum((values - quantize_values(values, fraction * peak, bitwidth, signed)) ** 2))
        for fraction in CANDIDATE_FRACTIONS
    ]
    return max(float(CANDIDATE_FRACTIONS[int(np.argmin(errors))] * peak), ALPHA_FLOOR)


def mse_range_init(x: Tensor, bitwidth: float, config: QuantizerConfig) -> np.ndarray:
    """
    Pick alpha minimizing sum((x - Q(x; alpha, b))^2) over the candidate grid.

    Per-channel configs search each trailing-axis channel independently.

    Returns:
        np.ndarray: Shape (1,) for per-tensor configs, (C,) for per-channel.
    """
    values = x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)
    if values.size == 0:
        raise ContractError("range initialization needs a non-empty sample")
    if not config.contains(bitwidth):
        raise ContractError(f"bitwidth {bitwidth} outside [{config.b_min}, {config.b_max}]")

    if config.per_channel:
        channels = values.reshape(-1, values.shape[-1])
        return np.array(
            [_best_alpha(channels[:, c], bitwidth, config.is_signed) for c in range(channels.shape[1])]
        )
    return np.array([_best_alpha(values.reshape(-1), bitwidth, config.is_signed)])
