"""
Quantized Model Interface

Defines the contract between a network with simulated quantizers and the
components that probe it (sensitivity estimation, curvature diagnostics).
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict

import numpy as np

from ..autodiff import Tensor
from ..quantsim import QuantizerState


@dataclass
class ProbeResult:
    """
    Outcome of one full-precision forward pass recorded on the active tape.

    ``weights`` maps weight-quantizer ids to the leaf tensors the loss was
    evaluated at (already clipped when clipping was requested);
    ``activations`` maps activation-quantizer ids to the (clipped) activation
    tensors feeding the next layer.
    """

    loss: Tensor
    batch_size: int
    weights: Dict[str, Tensor] = field(default_factory=dict)
    activations: Dict[str, Tensor] = field(default_factory=dict)


class QuantizedModel(ABC):
    """Abstract base class for networks whose tensors pass through quantizers."""

    @abstractmethod
    def quantizers(self) -> Dict[str, QuantizerState]:
        """
        Get all quantizers in registration order.

        Returns:
            Dict[str, QuantizerState]: Quantizer states keyed by quantizer id
        """
        pass

    @abstractmethod
    def probe(self, batch: Any, clip: bool = True) -> ProbeResult:
        """
        Run an unquantized forward pass for sensitivity estimation.

        The caller owns the tape; this method only records on it.

        Args:
            batch: Batch of training data
            clip: Evaluate at parameters/activations clipped to each
                quantizer's range instead of the raw values

        Returns:
            ProbeResult: Loss plus the tensors sensitivities are taken for
        """
        pass

    @abstractmethod
    def flat_parameters(self) -> np.ndarray:
        """
        Get a copy of all trainable network parameters as one flat vector.

        Returns:
            np.ndarray: Parameters in a fixed, model-defined order
        """
        pass

    @abstractmethod
    def loss_fn(self, batch: Any) -> Callable[[Tensor], Tensor]:
        """
        Get the full-precision loss on ``batch`` as a function of the flat
        parameter vector (same order as ``flat_parameters``).
        """
        pass

    @abstractmethod
    def weight_slices(self) -> Dict[str, slice]:
        """
        Get where each weight quantizer's parameters sit in the flat vector.

        Returns:
            Dict[str, slice]: Slices keyed by weight-quantizer id
        """
        pass
