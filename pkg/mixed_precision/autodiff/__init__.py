"""
Reverse-mode automatic differentiation over dense double-precision tensors.
"""

from .tensor import Tensor, as_tensor
from .tape import Tape, TapeRecord, backward, current_tape
from .operations import (
    GradientPolicy,
    Operation,
    add,
    add_uniform_noise,
    bias_add,
    clamp,
    clamp_ste,
    div,
    matmul,
    mean,
    mul,
    reduce_sum,
    relu,
    round_,
    round_ste,
    slice_view,
    softmax_cross_entropy,
    square,
    sub,
)
from .grad_check import finite_difference_gradient, grad_check, tape_gradient

__all__ = [
    "Tensor",
    "as_tensor",
    "Tape",
    "TapeRecord",
    "backward",
    "current_tape",
    "GradientPolicy",
    "Operation",
    "add",
    "add_uniform_noise",
    "bias_add",
    "clamp",
    "clamp_ste",
    "div",
    "matmul",
    "mean",
    "mul",
    "reduce_sum",
    "relu",
    "round_",
    "round_ste",
    "slice_view",
    "softmax_cross_entropy",
    "square",
    "sub",
    "finite_difference_gradient",
    "grad_check",
    "tape_gradient",
]
