"""
Differentiable operations over dense tensors.

Each operation is a small class with a ``forward`` over numpy arrays that saves
what its ``backward`` needs. The functional wrappers at the bottom of the module
run the forward and record the operation on the active tape whenever one of
the inputs is tracked.

Elementwise operations broadcast only over a trailing per-channel axis (an
operand of shape ``(C,)`` against ``(..., C)``) or from a single-element
operand; anything else is a DimensionError.
"""

from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ContractError, DimensionError
from .tape import current_tape
from .tensor import Tensor, as_tensor

Bound = Union[float, np.ndarray]


class GradientPolicy(Enum):
    """How round and clamp propagate gradients to their input."""
    EXACT = "exact"
    STRAIGHT_THROUGH = "straight_through"
    IDENTITY = "identity"


def _check_elementwise(op: str, a: np.ndarray, b: np.ndarray) -> None:
    if a.shape == b.shape or a.size == 1 or b.size == 1:
        return
    if b.ndim == 1 and a.ndim >= 1 and a.shape[-1] == b.shape[0]:
        return
    if a.ndim == 1 and b.ndim >= 1 and b.shape[-1] == a.shape[0]:
        return
    raise DimensionError(op, a.shape, b.shape)


def _reduce_to(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back onto the operand's shape."""
    if grad.shape == shape:
        return grad
    if int(np.prod(shape)) == 1:
        return np.full(shape, grad.sum())
    leading = tuple(range(grad.ndim - len(shape)))
    return grad.sum(axis=leading).reshape(shape)


class Operation(ABC):
    """A recorded operation; ``kind`` names it on the tape."""

    kind = "operation"

    @abstractmethod
    def forward(self, *inputs: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def backward(self, grad_output: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        pass


class Add(Operation):
    kind = "add"

    def forward(self, a, b):
        _check_elementwise(self.kind, a, b)
        self._shapes = (a.shape, b.shape)
        return a + b

    def backward(self, grad_output):
        return (
            _reduce_to(grad_output, self._shapes[0]),
            _reduce_to(grad_output, self._shapes[1]),
        )


class Sub(Operation):
    kind = "sub"

    def forward(self, a, b):
        _check_elementwise(self.kind, a, b)
        self._shapes = (a.shape, b.shape)
        return a - b

    def backward(self, grad_output):
        return (
            _reduce_to(grad_output, self._shapes[0]),
            _reduce_to(-grad_output, self._shapes[1]),
        )


class Mul(Operation):
    kind = "mul"

    def forward(self, a, b):
        _check_elementwise(self.kind, a, b)
        self._a, self._b = a, b
        return a * b

    def backward(self, grad_output):
        return (
            _reduce_to(grad_output * self._b, self._a.shape),
            _reduce_to(grad_output * self._a, self._b.shape),
        )


class Div(Operation):
    kind = "div"

    def forward(self, a, b):
        _check_elementwise(self.kind, a, b)
        self._a, self._b = a, b
        return a / b

    def backward(self, grad_output):
        return (
            _reduce_to(grad_output / self._b, self._a.shape),
            _reduce_to(-grad_output * self._a / (self._b * self._b), self._b.shape),
        )


class MatMul(Operation):
    kind = "matmul"

    def forward(self, a, b):
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise DimensionError(self.kind, a.shape, b.shape)
        self._a, self._b = a, b
        return a @ b

    def backward(self, grad_output):
        return grad_output @ self._b.T, self._a.T @ grad_output


class ReLU(Operation):
    kind = "relu"

    def forward(self, a):
        self._mask = a > 0
        return np.where(self._mask, a, 0.0)

    def backward(self, grad_output):
        return (grad_output * self._mask,)


class Mean(Operation):
    kind = "mean"

    def forward(self, a):
        self._shape = a.shape
        return np.array(a.mean())

    def backward(self, grad_output):
        size = max(int(np.prod(self._shape)), 1)
        return (np.full(self._shape, float(grad_output) / size),)


class Sum(Operation):
    kind = "sum"

    def forward(self, a):
        self._shape = a.shape
        return np.array(a.sum())

    def backward(self, grad_output):
        return (np.full(self._shape, float(grad_output)),)


class Clamp(Operation):
    """
    Clamp to [lo, hi]; bounds are constants, scalar or per-channel.

    EXACT passes gradient strictly inside the interval, STRAIGHT_THROUGH on the
    closed interval, IDENTITY everywhere.
    """

    kind = "clamp"

    def __init__(self, lo: Bound, hi: Bound, policy: GradientPolicy):
        self.lo = np.asarray(lo, dtype=np.float64)
        self.hi = np.asarray(hi, dtype=np.float64)
        self.policy = policy

    def forward(self, a):
        for bound in (self.lo, self.hi):
            _check_elementwise(self.kind, a, bound)
        self._a = a
        return np.clip(a, self.lo, self.hi)

    def backward(self, grad_output):
        if self.policy is GradientPolicy.IDENTITY:
            return (grad_output,)
        if self.policy is GradientPolicy.STRAIGHT_THROUGH:
            inside = (self._a >= self.lo) & (self._a <= self.hi)
        else:
            inside = (self._a > self.lo) & (self._a < self.hi)
        return (grad_output * inside,)


class Round(Operation):
    """Round to nearest (ties to even); EXACT has zero gradient almost everywhere."""

    kind = "round"

    def __init__(self, policy: GradientPolicy):
        self.policy = policy

    def forward(self, a):
        self._shape = a.shape
        return np.rint(a)

    def backward(self, grad_output):
        if self.policy is GradientPolicy.EXACT:
            return (np.zeros(self._shape),)
        return (grad_output,)


class AddUniformNoise(Operation):
    """Add U[-1/2, 1/2] noise drawn in forward; the sample is kept for replay."""

    kind = "uniform_noise"

    def __init__(self, rng: Optional[np.random.Generator] = None, noise: Optional[np.ndarray] = None):
        if rng is None and noise is None:
            raise ContractError("uniform noise needs either a generator or a frozen sample")
        self._rng = rng
        self.noise = None if noise is None else np.asarray(noise, dtype=np.float64)

    def forward(self, a):
        if self.noise is None:
            self.noise = self._rng.uniform(-0.5, 0.5, size=a.shape)
        elif self.noise.shape != a.shape:
            raise DimensionError(self.kind, a.shape, self.noise.shape)
        return a + self.noise

    def backward(self, grad_output):
        return (grad_output,)


class SliceView(Operation):
    """A contiguous run of the flattened input, reshaped."""

    kind = "slice_view"

    def __init__(self, start: int, stop: int, shape: Tuple[int, ...]):
        self.start = start
        self.stop = stop
        self.shape = tuple(shape)

    def forward(self, a):
        if not 0 <= self.start <= self.stop <= a.size or int(np.prod(self.shape)) != self.stop - self.start:
            raise DimensionError(self.kind, a.shape, self.shape)
        self._input_shape = a.shape
        return a.reshape(-1)[self.start:self.stop].reshape(self.shape).copy()

    def backward(self, grad_output):
        grad = np.zeros(int(np.prod(self._input_shape)))
        grad[self.start:self.stop] = np.asarray(grad_output).reshape(-1)
        return (grad.reshape(self._input_shape),)


class SoftmaxCrossEntropy(Operation):
    """Mean cross-entropy of integer labels under softmax(logits)."""

    kind = "softmax_cross_entropy"

    def __init__(self, labels: Sequence[int]):
        self.labels = np.asarray(labels, dtype=np.int64).reshape(-1)

    def forward(self, logits):
        self._shape = logits.shape
        batch = logits.reshape(1, -1) if logits.ndim == 1 else logits
        if batch.ndim != 2 or batch.shape[0] != self.labels.shape[0]:
            raise DimensionError(self.kind, logits.shape, self.labels.shape)
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= batch.shape[1]):
            raise ContractError(f"labels must lie in [0, {batch.shape[1]})")
        shifted = batch - batch.max(axis=1, keepdims=True)
        log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        log_probs = shifted - log_norm
        self._probs = np.exp(log_probs)
        rows = np.arange(batch.shape[0])
        return np.array(-log_probs[rows, self.labels].mean())

    def backward(self, grad_output):
        count = self._probs.shape[0]
        grad = self._probs.copy()
        grad[np.arange(count), self.labels] -= 1.0
        return ((float(grad_output) / count * grad).reshape(self._shape),)


def apply(operation: Operation, *inputs: Any) -> Tensor:
    """Run ``operation`` forward and record it if any input is tracked."""
    tensors = [as_tensor(value) for value in inputs]
    output = Tensor(operation.forward(*[tensor.data for tensor in tensors]))
    tape = current_tape()
    if tape is not None and any(tape.tracks(tensor) for tensor in tensors):
        tape.record(operation, tensors, output)
    return output


def add(a: Any, b: Any) -> Tensor:
    return apply(Add(), a, b)


def sub(a: Any, b: Any) -> Tensor:
    return apply(Sub(), a, b)


def mul(a: Any, b: Any) -> Tensor:
    return apply(Mul(), a, b)


def div(a: Any, b: Any) -> Tensor:
    return apply(Div(), a, b)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    return apply(MatMul(), a, b)


def bias_add(x: Tensor, bias: Tensor) -> Tensor:
    """Add a per-channel bias over the trailing axis of ``x``."""
    if bias.ndim != 1 or x.ndim < 1 or x.shape[-1] != bias.shape[0]:
        raise DimensionError("bias_add", x.shape, bias.shape)
    return apply(Add(), x, bias)


def relu(x: Tensor) -> Tensor:
    return apply(ReLU(), x)


def mean(x: Tensor) -> Tensor:
    return apply(Mean(), x)


def reduce_sum(x: Tensor) -> Tensor:
    return apply(Sum(), x)


def square(x: Tensor) -> Tensor:
    return apply(Mul(), x, x)


def clamp(x: Tensor, lo: Bound, hi: Bound, policy: GradientPolicy = GradientPolicy.EXACT) -> Tensor:
    return apply(Clamp(lo, hi, policy), x)


def clamp_ste(x: Tensor, lo: Bound, hi: Bound) -> Tensor:
    return clamp(x, lo, hi, GradientPolicy.STRAIGHT_THROUGH)


def round_(x: Tensor, policy: GradientPolicy = GradientPolicy.EXACT) -> Tensor:
    return apply(Round(policy), x)


def round_ste(x: Tensor) -> Tensor:
    return round_(x, GradientPolicy.STRAIGHT_THROUGH)


def add_uniform_noise(
    x: Tensor,
    rng: Optional[np.random.Generator] = None,
    noise: Optional[np.ndarray] = None,
) -> Tensor:
    return apply(AddUniformNoise(rng, noise), x)


def softmax_cross_entropy(logits: Tensor, labels: Sequence[int]) -> Tensor:
    return apply(SoftmaxCrossEntropy(labels), logits)


def slice_view(x: Tensor, where: slice, shape: Tuple[int, ...]) -> Tensor:
    """View ``x.reshape(-1)[where]`` as ``shape``."""
    start, stop, _ = where.indices(x.size)
    return apply(SliceView(start, stop, shape), x)
