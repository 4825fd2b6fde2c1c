"""
Reverse-mode differentiation tape.

Operations executed while a tape is active are appended in execution order,
which is a valid topological order; backward walks the records in reverse and
visits every recorded node exactly once.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..errors import ContractError, NumericError
from .tensor import Tensor

_ACTIVE_TAPES: List["Tape"] = []


@dataclass
class TapeRecord:
    """One recorded operation: input node ids (None for constants) and output id."""

    operation: "object"
    input_ids: tuple
    output_id: int


class Tape:
    """
    Ordered record of differentiable operations.

    Use as a context manager; tapes nest and the innermost one records.
    """

    def __init__(self):
        self._records: List[TapeRecord] = []
        self._tensors: Dict[int, Tensor] = {}
        self._next_id = 0

    def __enter__(self) -> "Tape":
        _ACTIVE_TAPES.append(self)
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        _ACTIVE_TAPES.remove(self)

    @property
    def records(self) -> List[TapeRecord]:
        return list(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def owns(self, tensor: Tensor) -> bool:
        return tensor._tape is self and tensor.node_id is not None

    def tracks(self, tensor: Tensor) -> bool:
        return tensor.requires_grad or self.owns(tensor)

    def watch(self, tensor: Tensor) -> int:
        """Assign a node id on this tape to ``tensor`` if it has none yet."""
        if not self.owns(tensor):
            tensor.node_id = self._next_id
            tensor._tape = self
            self._tensors[self._next_id] = tensor
            self._next_id += 1
        return tensor.node_id

    def record(self, operation: object, inputs: Sequence[Tensor], output: Tensor) -> None:
        input_ids = tuple(
            self.watch(tensor) if self.tracks(tensor) else None for tensor in inputs
        )
        output_id = self.watch(output)
        self._records.append(TapeRecord(operation, input_ids, output_id))

    def backward(self, loss: Tensor) -> None:
        """Accumulate d(loss)/d(node) into ``grad`` of every tracked tensor."""
        if not loss.is_scalar():
            raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
        if not self.owns(loss):
            raise ContractError("backward called on a loss that is not on this tape")

        grads: Dict[int, np.ndarray] = {loss.node_id: np.ones_like(loss.data)}
        for record in reversed(self._records):
            upstream = grads.get(record.output_id)
            if upstream is None:
                continue
            input_grads = record.operation.backward(upstream)
            for node_id, grad in zip(record.input_ids, input_grads):
                if node_id is None or grad is None:
                    continue
                if node_id in grads:
                    grads[node_id] = grads[node_id] + grad
                else:
                    grads[node_id] = grad

        for node_id, grad in grads.items():
            if not np.all(np.isfinite(grad)):
                raise NumericError(f"non-finite gradient at tape node {node_id}")
        for node_id, grad in grads.items():
            self._tensors[node_id].accumulate_grad(grad)


def current_tape() -> Optional[Tape]:
    return _ACTIVE_TAPES[-1] if _ACTIVE_TAPES else None


def backward(loss: Tensor) -> None:
    """Populate ``grad`` on all tensors tracked by the tape that produced ``loss``."""
    if not loss.is_scalar():
        raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
    tape = loss._tape
    if tape is None or loss.node_id is None:
        raise ContractError("backward called on a loss that was not recorded on a tape")
    tape.backward(loss)
