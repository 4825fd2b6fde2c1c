"""
Mutable per-quantizer state: learnable range and current bitwidth.
"""

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from ..autodiff import Tensor
from ..errors import ContractError
from .quantizer_config import QuantizationMode, QuantizerConfig, QuantizerRole

logger = logging.getLogger(__name__)


@dataclass
class QuantizerState:
    """
    A quantizer's learnable range ``alpha`` (one value per tensor or per
    channel), its bitwidth and its static configuration.
    """

    quantizer_id: str
    config: QuantizerConfig
    alpha: Tensor
    bitwidth: float

    def __post_init__(self):
        if not isinstance(self.alpha, Tensor):
            self.alpha = Tensor(np.atleast_1d(np.asarray(self.alpha, dtype=np.float64)))
        self.alpha.requires_grad = True
        self.alpha.name = f"{self.quantizer_id}.alpha"
        if self.alpha.ndim != 1:
            raise ContractError(f"{self.quantizer_id}: alpha must be one-dimensional")
        if not self.config.per_channel and self.alpha.size != 1:
            raise ContractError(f"{self.quantizer_id}: per-tensor alpha must hold one value")
        if np.any(self.alpha.data <= 0):
            raise ContractError(f"{self.quantizer_id}: alpha must be positive")
        _check_bitwidth(self, self.bitwidth, self.config.mode)
        self.bitwidth = float(self.bitwidth)

    @property
    def mode(self) -> QuantizationMode:
        return self.config.mode

    @property
    def role(self) -> QuantizerRole:
        return self.config.role

    @property
    def alpha_mean(self) -> float:
        return float(self.alpha.data.mean())


def _check_bitwidth(state: QuantizerState, bitwidth: float, mode: QuantizationMode) -> None:
    config = state.config
    if not config.contains(bitwidth):
        raise ContractError(
            f"{state.quantizer_id}: bitwidth {bitwidth} outside "
            f"[{config.b_min}, {config.b_max}]"
        )
    if mode is QuantizationMode.HARD and not float(bitwidth).is_integer():
        raise ContractError(
            f"{state.quantizer_id}: fractional bitwidth {bitwidth} in hard mode"
        )


def set_bitwidth(state: QuantizerState, bitwidth: float) -> None:
    """Assign a new bitwidth; alpha is left untouched."""
    _check_bitwidth(state, bitwidth, state.mode)
    state.bitwidth = float(bitwidth)


def set_mode(state: QuantizerState, mode: QuantizationMode) -> None:
    """Switch between hard and PQN quantization; hard mode needs integral bits."""
    if mode is state.mode:
        return
    _check_bitwidth(state, state.bitwidth, mode)
    state.config = dataclasses.replace(state.config, mode=mode)
    logger.debug("[QuantizerState] %s switched to %s", state.quantizer_id, mode.value)
