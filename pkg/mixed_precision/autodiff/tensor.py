"""
Dense double-precision tensor recorded on a differentiation tape.
"""

from typing import Any, Optional, Tuple

import numpy as np


class Tensor:
    """
    Dense multi-dimensional value with an optional gradient.

    Data is always stored as a float64 numpy array. A tensor is tracked by a
    tape when it is a leaf with ``requires_grad`` set, or when a tape-recorded
    operation produced it; tracked tensors receive ``grad`` on backward.
    """

    def __init__(self, data: Any, requires_grad: bool = False, name: Optional[str] = None):
        self.data = np.array(data, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.name = name
        self.node_id: Optional[int] = None
        self._tape = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def is_scalar(self) -> bool:
        return self.data.size == 1

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        """Return a copy of the underlying values."""
        return self.data.copy()

    def detach(self) -> "Tensor":
        """Return an untracked copy sharing no state with this tensor."""
        return Tensor(self.data.copy(), name=self.name)

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate_grad(self, grad: np.ndarray) -> None:
        grad = np.asarray(grad, dtype=np.float64).reshape(self.data.shape)
        self.grad = grad.copy() if self.grad is None else self.grad + grad

    # Operator sugar; the operations module owns the semantics.

    def __add__(self, other: Any) -> "Tensor":
        from .operations import add
        return add(self, other)

    def __radd__(self, other: Any) -> "Tensor":
        from .operations import add
        return add(other, self)

    def __sub__(self, other: Any) -> "Tensor":
        from .operations import sub
        return sub(self, other)

    def __rsub__(self, other: Any) -> "Tensor":
        from .operations import sub
        return sub(other, self)

    def __mul__(self, other: Any) -> "Tensor":
        from .operations import mul
        return mul(self, other)

    def __rmul__(self, other: Any) -> "Tensor":
        from .operations import mul
        return mul(other, self)

    def __truediv__(self, other: Any) -> "Tensor":
        from .operations import div
        return div(self, other)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from .operations import matmul
        return matmul(self, other)

    def __neg__(self) -> "Tensor":
        from .operations import mul
        return mul(self, -1.0)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"


def as_tensor(value: Any) -> Tensor:
    """Wrap plain numbers and arrays as untracked constants."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)
