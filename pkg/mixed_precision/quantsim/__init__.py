"""
Simulated quantizers: hard straight-through rounding, pseudo-quantization
noise, range initialization and clipping.
"""

from .quantizer_config import (
    DEFAULT_B_MAX,
    DEFAULT_B_MIN,
    Granularity,
    QuantizationMode,
    QuantizerConfig,
    QuantizerRole,
    Signedness,
)
from .quantizer_state import QuantizerState, set_bitwidth, set_mode
from .quantizer import (
    clip_on_tape,
    clip_params,
    fake_quantize,
    grid_levels,
    grid_limits,
    pqn_quantize,
    quantize,
    quantize_values,
    representable_range,
    step_size,
)
from .range_init import ALPHA_FLOOR, mse_range_init

__all__ = [
    "DEFAULT_B_MAX",
    "DEFAULT_B_MIN",
    "Granularity",
    "QuantizationMode",
    "QuantizerConfig",
    "QuantizerRole",
    "Signedness",
    "QuantizerState",
    "set_bitwidth",
    "set_mode",
    "clip_on_tape",
    "clip_params",
    "fake_quantize",
    "grid_levels",
    "grid_limits",
    "pqn_quantize",
    "quantize",
    "quantize_values",
    "representable_range",
    "step_size",
    "ALPHA_FLOOR",
    "mse_range_init",
]
