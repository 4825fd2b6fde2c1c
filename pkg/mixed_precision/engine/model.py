"""
Small multilayer perceptron with simulated quantizers.

Every dense layer has a signed weight quantizer (per output channel by
default); the input of every layer except the first passes through an
unsigned per-tensor activation quantizer. Biases stay in full precision.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..autodiff import (
    Tensor,
    bias_add,
    matmul,
    relu,
    slice_view,
    softmax_cross_entropy,
)
from ..data.dataset import Dataset
from ..errors import ContractError
from ..interfaces.quantized_model import ProbeResult, QuantizedModel
from ..quantsim import (
    DEFAULT_B_MAX,
    DEFAULT_B_MIN,
    Granularity,
    QuantizationMode,
    QuantizerConfig,
    QuantizerRole,
    QuantizerState,
    Signedness,
    clip_on_tape,
    clip_params,
    fake_quantize,
    mse_range_init,
    quantize_values,
    set_mode,
)

logger = logging.getLogger(__name__)

SUPPORTED_ACTIVATIONS = ("relu",)
CALIBRATION_SAMPLES = 256

QuantizeFn = Callable[[Tensor, QuantizerState], Tensor]


@dataclass(frozen=True)
class ModelSpec:
    """
    Layer widths from input to output, e.g. ``(2, 64, 8, 64, 2)`` has four
    dense layers. At least two layers are required.
    """

    layer_widths: Tuple[int, ...]
    activation: str = "relu"
    seed: int = 0
    per_channel_weights: bool = True

    def __post_init__(self):
        object.__setattr__(self, "layer_widths", tuple(int(w) for w in self.layer_widths))
        if len(self.layer_widths) < 3:
            raise ContractError(f"a model needs at least two layers, got widths {self.layer_widths}")
        if any(width < 1 for width in self.layer_widths):
            raise ContractError(f"layer widths must be positive, got {self.layer_widths}")
        if self.activation not in SUPPORTED_ACTIVATIONS:
            raise ContractError(f"unsupported activation {self.activation!r}")

    @property
    def num_layers(self) -> int:
        return len(self.layer_widths) - 1

    def weight_quantizer_id(self, layer: int) -> str:
        return f"layer{layer}.weight"

    def activation_quantizer_id(self, layer: int) -> str:
        return f"layer{layer}.input"


class QuantizedMLP(QuantizedModel):
    """ReLU network whose weights and hidden activations are fake-quantized."""

    def __init__(
        self,
        spec: ModelSpec,
        b_min: int = DEFAULT_B_MIN,
        b_max: int = DEFAULT_B_MAX,
        initial_bitwidth: Optional[int] = None,
        quantized: bool = True,
    ):
        self.spec = spec
        self.quantized = quantized
        bitwidth = b_max if initial_bitwidth is None else initial_bitwidth
        rng = np.random.default_rng(spec.seed)

        self.weights: List[Tensor] = []
        self.biases: List[Tensor] = []
        for layer, (fan_in, fan_out) in enumerate(zip(spec.layer_widths[:-1], spec.layer_widths[1:])):
            scale = np.sqrt(2.0 / fan_in)
            self.weights.append(
                Tensor(rng.normal(0.0, scale, size=(fan_in, fan_out)), requires_grad=True, name=f"layer{layer}.W")
            )
            self.biases.append(Tensor(np.zeros(fan_out), requires_grad=True, name=f"layer{layer}.b"))

        weight_config = QuantizerConfig(
            signedness=Signedness.SIGNED,
            granularity=Granularity.PER_CHANNEL if spec.per_channel_weights else Granularity.PER_TENSOR,
            role=QuantizerRole.WEIGHT,
            b_min=b_min,
            b_max=b_max,
        )
        activation_config = QuantizerConfig(
            signedness=Signedness.UNSIGNED,
            granularity=Granularity.PER_TENSOR,
            role=QuantizerRole.ACTIVATION,
            b_min=b_min,
            b_max=b_max,
        )
        self._quantizers: Dict[str, QuantizerState] = {}
        for layer, weight in enumerate(self.weights):
            if layer > 0:
                quantizer_id = spec.activation_quantizer_id(layer)
                self._quantizers[quantizer_id] = QuantizerState(quantizer_id, activation_config, np.ones(1), bitwidth)
            quantizer_id = spec.weight_quantizer_id(layer)
            alpha = mse_range_init(weight, bitwidth, weight_config)
            self._quantizers[quantizer_id] = QuantizerState(quantizer_id, weight_config, alpha, bitwidth)

    def quantizers(self) -> Dict[str, QuantizerState]:
        return self._quantizers

    def parameters(self) -> List[Tensor]:
        """Network parameters, weights and biases interleaved per layer."""
        params = []
        for weight, bias in zip(self.weights, self.biases):
            params.extend((weight, bias))
        return params

    def alphas(self) -> List[Tensor]:
        return [state.alpha for state in self._quantizers.values()]

    def set_mode(self, mode: QuantizationMode) -> None:
        for state in self._quantizers.values():
            set_mode(state, mode)

    def initialize_ranges(self, dataset: Dataset) -> None:
        """MSE range init of every activation quantizer on a calibration sample."""
        if dataset.is_empty():
            raise ContractError("range calibration needs a non-empty dataset")
        sample = Tensor(dataset.features[:CALIBRATION_SAMPLES])
        for layer, (weight, bias) in enumerate(zip(self.weights, self.biases)):
            if layer > 0:
                state = self._quantizers[self.spec.activation_quantizer_id(layer)]
                sample = Tensor(np.maximum(sample.data, 0.0))
                state.alpha.data = mse_range_init(sample, state.bitwidth, state.config)
            sample = Tensor(sample.data @ weight.data + bias.data)
        logger.debug("[QuantizedMLP] calibrated %d activation ranges", self.spec.num_layers - 1)

    def _forward(
        self,
        features: Tensor,
        weights: List[Tensor],
        biases: List[Tensor],
        quantize_fn: Optional[QuantizeFn],
    ) -> Tensor:
        hidden = features
        for layer, (weight, bias) in enumerate(zip(weights, biases)):
            if layer > 0:
                hidden = relu(hidden)
                quantizer_id = self.spec.activation_quantizer_id(layer)
                if quantize_fn is not None:
                    hidden = quantize_fn(hidden, self._quantizers[quantizer_id])
            if quantize_fn is not None:
                weight = quantize_fn(weight, self._quantizers[self.spec.weight_quantizer_id(layer)])
            hidden = bias_add(matmul(hidden, weight), bias)
        return hidden

    def logits(self, features: np.ndarray, rng: Optional[np.random.Generator] = None) -> Tensor:
        """Quantized forward pass recorded on the active tape."""

        def quantize_fn(x: Tensor, state: QuantizerState) -> Tensor:
            return fake_quantize(x, state, rng)

        return self._forward(
            Tensor(features), self.weights, self.biases, quantize_fn if self.quantized else None
        )

    def loss(self, batch: Dataset, rng: Optional[np.random.Generator] = None) -> Tensor:
        return softmax_cross_entropy(self.logits(batch.features, rng), batch.labels)

    def predict(self, features: np.ndarray) -> np.ndarray:
        """
        Class predictions under hard quantization at the current bitwidths.

        Bitwidths are used as they are. During PQN with the fractional
        allocator they are real-valued, so phase-1 accuracies are measured on
        a grid of 2^b - 1 levels that no integer deployment has; only
        accuracies after the boundary allocation reflect integer bitwidths.
        """

        def hard(x: Tensor, state: QuantizerState) -> Tensor:
            return Tensor(quantize_values(x.data, state.alpha.data, state.bitwidth, state.config.is_signed))

        weights = [weight.detach() for weight in self.weights]
        biases = [bias.detach() for bias in self.biases]
        logits = self._forward(Tensor(features), weights, biases, hard if self.quantized else None)
        return np.argmax(logits.data, axis=1)

    def probe(self, batch: Dataset, clip: bool = True) -> ProbeResult:
        weights = []
        weight_taps: Dict[str, Tensor] = {}
        for layer, weight in enumerate(self.weights):
            quantizer_id = self.spec.weight_quantizer_id(layer)
            leaf = clip_params(weight, self._quantizers[quantizer_id]) if clip else weight.detach()
            leaf.requires_grad = True
            weights.append(leaf)
            weight_taps[quantizer_id] = leaf
        biases = [Tensor(bias.data.copy(), requires_grad=True) for bias in self.biases]

        activation_taps: Dict[str, Tensor] = {}
        hidden = Tensor(batch.features)
        for layer, (weight, bias) in enumerate(zip(weights, biases)):
            if layer > 0:
                hidden = relu(hidden)
                quantizer_id = self.spec.activation_quantizer_id(layer)
                if clip:
                    hidden = clip_on_tape(hidden, self._quantizers[quantizer_id])
                activation_taps[quantizer_id] = hidden
            hidden = bias_add(matmul(hidden, weight), bias)
        loss = softmax_cross_entropy(hidden, batch.labels)
        return ProbeResult(loss, len(batch), weight_taps, activation_taps)

    def flat_parameters(self) -> np.ndarray:
        return np.concatenate([param.data.reshape(-1) for param in self.parameters()])

    def _layout(self) -> List[Tuple[slice, Tuple[int, ...]]]:
        layout = []
        offset = 0
        for param in self.parameters():
            layout.append((slice(offset, offset + param.size), param.shape))
            offset += param.size
        return layout

    def weight_slices(self) -> Dict[str, slice]:
        layout = self._layout()
        return {self.spec.weight_quantizer_id(layer): layout[2 * layer][0] for layer in range(self.spec.num_layers)}

    def loss_fn(self, batch: Dataset) -> Callable[[Tensor], Tensor]:
        layout = self._layout()

        def full_precision_loss(theta: Tensor) -> Tensor:
            views = [slice_view(theta, where, shape) for where, shape in layout]
            logits = self._forward(Tensor(batch.features), views[0::2], views[1::2], None)
            return softmax_cross_entropy(logits, batch.labels)

        return full_precision_loss
