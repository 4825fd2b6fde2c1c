"""
Quantizer configuration types.
"""

from dataclasses import dataclass
from enum import Enum

from ..errors import ContractError

DEFAULT_B_MIN = 2
DEFAULT_B_MAX = 8


class Signedness(Enum):
    SIGNED = "signed"
    UNSIGNED = "unsigned"


class Granularity(Enum):
    PER_TENSOR = "per_tensor"
    PER_CHANNEL = "per_channel"


class QuantizationMode(Enum):
    """Hard rounding with straight-through gradients, or pseudo-quantization noise."""
    HARD = "hard"
    PQN = "pqn"


class QuantizerRole(Enum):
    WEIGHT = "weight"
    ACTIVATION = "activation"


@dataclass(frozen=True)
class QuantizerConfig:
    """
    Static description of a symmetric uniform quantizer (zero-point fixed at 0).

    Per-channel quantizers scale along the trailing axis of the quantized
    tensor, which for a dense weight matrix of shape (in, out) is the output
    channel.
    """

    signedness: Signedness = Signedness.SIGNED
    granularity: Granularity = Granularity.PER_TENSOR
    mode: QuantizationMode = QuantizationMode.HARD
    role: QuantizerRole = QuantizerRole.WEIGHT
    b_min: int = DEFAULT_B_MIN
    b_max: int = DEFAULT_B_MAX

    def __post_init__(self):
        if self.b_min < 1:
            raise ContractError(f"b_min must be at least 1, got {self.b_min}")
        if self.b_max < self.b_min:
            raise ContractError(f"b_max ({self.b_max}) is below b_min ({self.b_min})")
        if self.signedness is Signedness.SIGNED and self.b_min < 2:
            raise ContractError("signed quantizers need b_min >= 2 (1 bit has no magnitude level)")
        if self.granularity is Granularity.PER_CHANNEL and self.role is not QuantizerRole.WEIGHT:
            raise ContractError("per-channel granularity is only supported for weight quantizers")

    @property
    def is_signed(self) -> bool:
        return self.signedness is Signedness.SIGNED

    @property
    def per_channel(self) -> bool:
        return self.granularity is Granularity.PER_CHANNEL

    def contains(self, bitwidth: float) -> bool:
        return self.b_min <= bitwidth <= self.b_max
