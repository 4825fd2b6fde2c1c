"""
Simulated uniform quantizers.

Hard quantization is ``delta * clamp(round(x / delta), l(b), u(b))`` built from
tape operations with straight-through round and clamp, so the range gradient
falls out of the chain rule through ``delta = alpha / levels(b)``:

* inside the grid:   dQ/dalpha = (round(x/delta) - x/delta) / levels(b)
* clamped high/low:  dQ/dalpha = u(b) / levels(b)  or  l(b) / levels(b)

The pseudo-quantization-noise quantizer replaces the rounding with additive
U[-1/2, 1/2] noise in the integer domain and is differentiable everywhere
inside the grid.
"""

from typing import Optional, Tuple

import numpy as np

from ..autodiff import (
    GradientPolicy,
    Tensor,
    add_uniform_noise,
    clamp,
    clamp_ste,
    div,
    mul,
    round_ste,
)
from ..errors import ContractError
from .quantizer_config import QuantizationMode
from .quantizer_state import QuantizerState


def grid_levels(bitwidth: float, signed: bool) -> float:
    """Number of positive integer levels: 2^b - 1 unsigned, 2^(b-1) - 1 signed."""
    if bitwidth <= 0:
        raise ContractError(f"bitwidth must be positive, got {bitwidth}")
    levels = 2.0 ** (bitwidth - 1) - 1.0 if signed else 2.0**bitwidth - 1.0
    if levels <= 0:
        raise ContractError(f"bitwidth {bitwidth} leaves no quantization levels")
    return levels


def grid_limits(bitwidth: float, signed: bool) -> Tuple[float, float]:
    """Integer-domain clamp thresholds (l(b), u(b)) of the symmetric grid."""
    levels = grid_levels(bitwidth, signed)
    return (-levels if signed else 0.0), levels


def step_size(state: QuantizerState) -> np.ndarray:
    """Per-channel (or single) step size delta = alpha / levels(b)."""
    if np.any(state.alpha.data <= 0):
        raise ContractError(f"{state.quantizer_id}: alpha must be positive")
    return state.alpha.data / grid_levels(state.bitwidth, state.config.is_signed)


def _step_tensor(state: QuantizerState) -> Tensor:
    if np.any(state.alpha.data <= 0):
        raise ContractError(f"{state.quantizer_id}: alpha must be positive")
    return div(state.alpha, grid_levels(state.bitwidth, state.config.is_signed))


def quantize(x: Tensor, state: QuantizerState) -> Tensor:
    """Hard quantization with straight-through gradients for x and alpha."""
    if state.mode is not QuantizationMode.HARD:
        raise ContractError(f"{state.quantizer_id}: quantize needs hard mode")
    if not float(state.bitwidth).is_integer():
        raise ContractError(
            f"{state.quantizer_id}: fractional bitwidth {state.bitwidth} in hard mode"
        )
    lo, hi = grid_limits(state.bitwidth, state.config.is_signed)
    delta = _step_tensor(state)
    integers = clamp_ste(round_ste(div(x, delta)), lo, hi)
    return mul(integers, delta)


def pqn_quantize(
    x: Tensor,
    state: QuantizerState,
    rng: Optional[np.random.Generator] = None,
    noise: Optional[np.ndarray] = None,
) -> Tensor:
    """
    Pseudo-quantization noise: delta * clamp(x/delta + eps, l(b), u(b)).

    Args:
        x: Tensor to quantize
        state: Quantizer in PQN mode; the bitwidth may be fractional
        rng: Generator for eps ~ U[-1/2, 1/2], one sample per element
        noise: Frozen eps sample, used instead of ``rng`` when given
    """
    if state.mode is not QuantizationMode.PQN:
        raise ContractError(f"{state.quantizer_id}: pqn_quantize needs PQN mode")
    lo, hi = grid_limits(state.bitwidth, state.config.is_signed)
    delta = _step_tensor(state)
    noisy = add_uniform_noise(div(x, delta), rng=rng, noise=noise)
    return mul(clamp_ste(noisy, lo, hi), delta)


def fake_quantize(x: Tensor, state: QuantizerState, rng: Optional[np.random.Generator] = None) -> Tensor:
    """Quantize according to the state's current mode."""
    if state.mode is QuantizationMode.PQN:
        return pqn_quantize(x, state, rng=rng)
    return quantize(x, state)


def representable_range(state: QuantizerState) -> Tuple[np.ndarray, np.ndarray]:
    """Real-valued clipping interval: [-alpha, alpha] signed, [0, alpha] unsigned."""
    hi = state.alpha.data
    lo = -hi if state.config.is_signed else np.zeros_like(hi)
    return lo, hi


def clip_params(theta: Tensor, state: QuantizerState) -> Tensor:
    """Clamp values to the quantizer's representable range without rounding."""
    lo, hi = representable_range(state)
    return Tensor(np.clip(theta.data, lo, hi), name=theta.name)


def clip_on_tape(x: Tensor, state: QuantizerState) -> Tensor:
    """Clip as a recorded operation whose gradient passes straight through."""
    lo, hi = representable_range(state)
    return clamp(x, lo, hi, GradientPolicy.IDENTITY)


def quantize_values(values: np.ndarray, alpha: np.ndarray, bitwidth: float, signed: bool) -> np.ndarray:
    """Plain numpy hard quantization, used where no gradient is needed."""
    lo, hi = grid_limits(bitwidth, signed)
    delta = np.asarray(alpha, dtype=np.float64) / grid_levels(bitwidth, signed)
    return np.clip(np.rint(values / delta), lo, hi) * delta
