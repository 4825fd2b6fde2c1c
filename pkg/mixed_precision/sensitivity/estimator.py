"""
FIT sensitivity estimation with exponential moving averages.

Weight sensitivities are the elementwise squared gradients of the
full-precision loss taken at the clipped parameters. Activation
sensitivities are the squared per-sample gradients w.r.t. each quantized
activation, summed over its elements and averaged over the batch. Both are
folded into a running average S = gamma * new + (1 - gamma) * S; the first
observation initializes S directly.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np

from ..autodiff import Tape, backward
from ..errors import ContractError, NumericError
from ..interfaces.quantized_model import ProbeResult, QuantizedModel
from ..quantsim import QuantizerState

logger = logging.getLogger(__name__)

DEFAULT_GAMMA = 0.9
DEFAULT_UPDATE_PERIOD = 2


@dataclass(frozen=True)
class SensitivitySnapshot:
    """
    Per-quantizer objective weights A_q = sum_i S_i * alpha_c(i)^2 and element
    counts e_q, frozen at one iteration.
    """

    iteration: int
    weights: Dict[str, float]
    element_counts: Dict[str, int]
    roles: Dict[str, str] = field(default_factory=dict)

    @property
    def quantizer_ids(self) -> Tuple[str, ...]:
        return tuple(self.weights)

    def __post_init__(self):
        for quantizer_id, value in self.weights.items():
            if not np.isfinite(value) or value < 0:
                raise ContractError(f"{quantizer_id}: sensitivity weight must be finite and >= 0")
        for quantizer_id, count in self.element_counts.items():
            if count <= 0:
                raise ContractError(f"{quantizer_id}: element count must be positive")


class SensitivityEstimator:
    """
    Running FIT sensitivities for every quantizer of a model.

    State for a weight quantizer has the shape of its parameter tensor; for an
    activation quantizer it is a single value.
    """

    def __init__(self, gamma: float = DEFAULT_GAMMA, update_period: int = DEFAULT_UPDATE_PERIOD, clip: bool = True):
        if not 0.0 < gamma <= 1.0:
            raise ContractError(f"gamma must lie in (0, 1], got {gamma}")
        if update_period < 1:
            raise ContractError(f"update_period must be positive, got {update_period}")
        self.gamma = gamma
        self.update_period = update_period
        self.clip = clip
        self.iteration = 0
        self._state: Dict[str, np.ndarray] = {}
        self._element_counts: Dict[str, int] = {}
        self._observations: Dict[str, int] = {}

    def should_update(self, iteration: int) -> bool:
        return iteration % self.update_period == 0

    def is_initialized(self, quantizer_id: str) -> bool:
        return quantizer_id in self._state

    def observation_count(self, quantizer_id: str) -> int:
        return self._observations.get(quantizer_id, 0)

    def value(self, quantizer_id: str) -> np.ndarray:
        """Current EMA state of one quantizer (a copy)."""
        if quantizer_id not in self._state:
            raise ContractError(f"quantizer {quantizer_id!r} has no sensitivity observation yet")
        return self._state[quantizer_id].copy()

    def observe(self, quantizer_id: str, observation: Any, element_count: Optional[int] = None) -> None:
        """Fold one raw observation into the running average."""
        observation = np.atleast_1d(np.asarray(observation, dtype=np.float64))
        if not np.all(np.isfinite(observation)):
            raise NumericError(f"{quantizer_id}: non-finite sensitivity observation")
        if np.any(observation < 0):
            raise ContractError(f"{quantizer_id}: sensitivity observations must be non-negative")
        previous = self._state.get(quantizer_id)
        if previous is None:
            self._state[quantizer_id] = observation.copy()
        else:
            self._state[quantizer_id] = self.gamma * observation + (1.0 - self.gamma) * previous
        self._observations[quantizer_id] = self._observations.get(quantizer_id, 0) + 1
        if element_count is not None:
            self._element_counts[quantizer_id] = int(element_count)
        elif quantizer_id not in self._element_counts:
            self._element_counts[quantizer_id] = int(observation.size)

    def _probe(self, model: QuantizedModel, batch: Any) -> ProbeResult:
        if batch is None or len(batch) == 0:
            raise ContractError("sensitivity probes need a non-empty batch")
        with Tape():
            result = model.probe(batch, clip=self.clip)
            backward(result.loss)
        return result

    @staticmethod
    def _weight_observations(result: ProbeResult) -> Dict[str, Tuple[np.ndarray, int]]:
        observations = {}
        for quantizer_id, tensor in result.weights.items():
            grad = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
            observations[quantizer_id] = (grad * grad, tensor.size)
        return observations

    @staticmethod
    def _activation_observations(result: ProbeResult) -> Dict[str, Tuple[np.ndarray, int]]:
        observations = {}
        count = result.batch_size
        for quantizer_id, tensor in result.activations.items():
            grad = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
            # The probe loss is a batch mean; undo it to get per-sample gradients.
            per_sample = grad * count
            value = float(np.sum(per_sample * per_sample)) / count
            elements = int(tensor.size // max(count, 1))
            observations[quantizer_id] = (np.array([value]), max(elements, 1))
        return observations

    def _fold_all(self, observations: Dict[str, Tuple[np.ndarray, int]]) -> None:
        for quantizer_id, (values, _) in observations.items():
            if not np.all(np.isfinite(values)):
                raise NumericError(f"{quantizer_id}: non-finite gradient in sensitivity probe")
        for quantizer_id, (values, elements) in observations.items():
            self.observe(quantizer_id, values, elements)

    def fit_update(self, model: QuantizedModel, batch: Any) -> None:
        """Fold squared parameter gradients at the clipped parameters into S."""
        self._fold_all(self._weight_observations(self._probe(model, batch)))
        self.iteration += 1

    def activation_fit_update(self, model: QuantizedModel, batch: Any) -> None:
        """Fold batch-averaged squared activation gradients into S."""
        self._fold_all(self._activation_observations(self._probe(model, batch)))
        self.iteration += 1

    def update(self, model: QuantizedModel, batch: Any) -> None:
        """Weight and activation updates sharing a single forward/backward pass."""
        result = self._probe(model, batch)
        observations = self._weight_observations(result)
        observations.update(self._activation_observations(result))
        self._fold_all(observations)
        self.iteration += 1
        logger.debug("[SensitivityEstimator] update %d folded %d quantizers", self.iteration, len(observations))

    def channel_sums(self, quantizer_id: str, state: QuantizerState) -> np.ndarray:
        """Sensitivity summed per alpha channel of ``state``."""
        values = self.value(quantizer_id)
        if state.config.per_channel:
            return values.reshape(-1, state.alpha.size).sum(axis=0)
        return np.array([values.sum()])

    def snapshot(self, quantizers: Dict[str, QuantizerState], iteration: Optional[int] = None) -> SensitivitySnapshot:
        """
        Weight each quantizer's sensitivity by its current squared range.

        Raises:
            ContractError: If any quantizer has not been observed yet
        """
        weights: Dict[str, float] = {}
        counts: Dict[str, int] = {}
        roles: Dict[str, str] = {}
        for quantizer_id, state in quantizers.items():
            if quantizer_id not in self._state:
                raise ContractError(f"quantizer {quantizer_id!r} has no sensitivity observation yet")
            sums = self.channel_sums(quantizer_id, state)
            weights[quantizer_id] = float(np.sum(sums * state.alpha.data ** 2))
            counts[quantizer_id] = self._element_counts[quantizer_id]
            roles[quantizer_id] = state.role.value
        stamp = self.iteration if iteration is None else iteration
        return SensitivitySnapshot(stamp, weights, counts, roles)

    def reset(self, quantizer_ids: Optional[Iterable[str]] = None) -> None:
        targets = list(self._state) if quantizer_ids is None else list(quantizer_ids)
        for quantizer_id in targets:
            self._state.pop(quantizer_id, None)
            self._observations.pop(quantizer_id, None)

