"""
Tests for FIT sensitivity estimation, snapshots and the Hessian oracle.
"""

import os
import sys

import numpy as np
import pytest

# Add the project root to the path
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

from mixed_precision.autodiff import Tensor, finite_difference_gradient, mul, reduce_sum, slice_view  # noqa: E402
from mixed_precision.data import Dataset  # noqa: E402
from mixed_precision.errors import ContractError, NumericError  # noqa: E402
from mixed_precision.quantsim import Granularity, QuantizerConfig, QuantizerState  # noqa: E402
from mixed_precision.sensitivity import (  # noqa: E402
    SensitivityEstimator,
    SensitivitySnapshot,
    fit_hessian_agreement,
    hessian_diag_fd,
    hessian_diagonal,
    rank_correlation,
)
from mixed_precision.testing import (  # noqa: E402
    ActivationProbeModel,
    LogisticRegressionModel,
    QuadraticModel,
    ScaledChainModel,
)


def test_ema_recurrence():
    """Test S = gamma * new + (1 - gamma) * S after a first direct observation."""
    estimator = SensitivityEstimator(gamma=0.9)
    estimator.observe("q", 10.0)
    assert estimator.value("q")[0] == 10.0
    estimator.observe("q", 20.0)
    assert estimator.value("q")[0] == pytest.approx(19.0)
    assert estimator.observation_count("q") == 2


def test_gamma_one_keeps_the_latest_observation():
    """Test gamma = 1 discards history."""
    estimator = SensitivityEstimator(gamma=1.0)
    for value in (3.0, 7.0, 5.0):
        estimator.observe("q", value)
    assert estimator.value("q")[0] == 5.0


def test_estimator_argument_validation():
    """Test gamma and the update period are range checked."""
    with pytest.raises(ContractError):
        SensitivityEstimator(gamma=0.0)
    with pytest.raises(ContractError):
        SensitivityEstimator(gamma=1.5)
    with pytest.raises(ContractError):
        SensitivityEstimator(update_period=0)


def test_observations_must_be_finite_and_non_negative():
    """Test bad observations are rejected before touching the state."""
    estimator = SensitivityEstimator()
    with pytest.raises(NumericError):
        estimator.observe("q", [1.0, np.nan])
    with pytest.raises(ContractError):
        estimator.observe("q", [-1.0])
    assert not estimator.is_initialized("q")
    with pytest.raises(ContractError):
        estimator.value("q")


def test_update_schedule():
    """Test updates fire on multiples of the period."""
    estimator = SensitivityEstimator(update_period=2)
    assert [estimator.should_update(i) for i in range(5)] == [True, False, True, False, True]


def test_weight_fit_on_quadratic():
    """Test dL/dtheta = h * theta gives S = (h * theta)^2."""
    model = QuadraticModel([3.0], curvature=[2.0])
    estimator = SensitivityEstimator()
    estimator.fit_update(model, batch=[0])
    np.testing.assert_allclose(estimator.value(QuadraticModel.QUANTIZER_ID), [36.0])
    assert estimator.iteration == 1


def test_weight_fit_evaluates_at_clipped_parameters():
    """Test clipping to [-alpha, alpha] happens before the gradient is taken."""
    theta, curvature = [3.0, 20.0], [2.0, 1.0]
    clipped = SensitivityEstimator(clip=True)
    clipped.fit_update(QuadraticModel(theta, curvature, alpha=10.0), batch=[0])
    np.testing.assert_allclose(clipped.value(QuadraticModel.QUANTIZER_ID), [36.0, 100.0])

    raw = SensitivityEstimator(clip=False)
    raw.fit_update(QuadraticModel(theta, curvature, alpha=10.0), batch=[0])
    np.testing.assert_allclose(raw.value(QuadraticModel.QUANTIZER_ID), [36.0, 400.0])


def test_update_matches_fit_update_for_weight_only_models():
    """Test the combined update agrees with the weight-only update."""
    first, second = SensitivityEstimator(), SensitivityEstimator()
    first.fit_update(QuadraticModel([1.0, -2.0], [3.0, 0.5]), batch=[0])
    second.update(QuadraticModel([1.0, -2.0], [3.0, 0.5]), batch=[0])
    np.testing.assert_allclose(
        first.value(QuadraticModel.QUANTIZER_ID), second.value(QuadraticModel.QUANTIZER_ID)
    )


def test_empty_batch_is_rejected():
    """Test probes need at least one sample."""
    with pytest.raises(ContractError):
        SensitivityEstimator().fit_update(QuadraticModel([1.0]), batch=[])


def test_activation_fit_on_single_sample():
    """Test L = z^2 at z = 2 gives (dL/dz)^2 = 16."""
    estimator = SensitivityEstimator()
    estimator.activation_fit_update(ActivationProbeModel(), Dataset([[2.0]], [0]))
    assert estimator.value(ActivationProbeModel.QUANTIZER_ID)[0] == pytest.approx(16.0)


def test_activation_fit_averages_per_sample_gradients():
    """Test a duplicated sample gives the same value as a single one."""
    estimator = SensitivityEstimator()
    estimator.activation_fit_update(ActivationProbeModel(), Dataset([[2.0], [2.0]], [0, 0]))
    assert estimator.value(ActivationProbeModel.QUANTIZER_ID)[0] == pytest.approx(16.0)


def test_activation_fit_element_count_is_per_sample():
    """Test activation element counts exclude the batch axis."""
    estimator = SensitivityEstimator()
    batch = Dataset(np.ones((4, 3)), np.zeros(4))
    estimator.activation_fit_update(ActivationProbeModel(), batch)
    states = ActivationProbeModel().quantizers()
    assert estimator.snapshot(states).element_counts[ActivationProbeModel.QUANTIZER_ID] == 3


def test_activation_fit_through_a_scaled_chain():
    """Test the earlier activation of y = 2z sees a four times larger sensitivity."""
    estimator = SensitivityEstimator()
    estimator.update(ScaledChainModel(scale=2.0), Dataset([[1.0], [-0.5]], [0, 0]))
    s_z = estimator.value(ScaledChainModel.INPUT_ID)[0]
    s_y = estimator.value(ScaledChainModel.OUTPUT_ID)[0]
    assert s_y == pytest.approx(16.0 * (1.0 + 0.25) / 2.0)
    assert s_z == pytest.approx(4.0 * s_y)


def test_snapshot_weights_sensitivity_by_squared_range():
    """Test A = sum(S) * alpha^2 per tensor and per channel."""
    estimator = SensitivityEstimator()
    estimator.observe("tensor", [5.0, 15.0])
    estimator.observe("channels", [[1.0, 2.0], [2.0, 3.0]])
    per_tensor = QuantizerState("tensor", QuantizerConfig(), 1.0, 4)
    per_channel = QuantizerState("channels", QuantizerConfig(granularity=Granularity.PER_CHANNEL), [1.0, 2.0], 4)
    snapshot = estimator.snapshot({"tensor": per_tensor, "channels": per_channel}, iteration=12)
    assert snapshot.iteration == 12
    assert snapshot.weights == {"tensor": pytest.approx(20.0), "channels": pytest.approx(23.0)}
    assert snapshot.element_counts == {"tensor": 2, "channels": 4}
    assert snapshot.roles == {"tensor": "weight", "channels": "weight"}
    np.testing.assert_array_equal(estimator.channel_sums("channels", per_channel), [3.0, 5.0])


def test_snapshot_requires_every_quantizer_observed():
    """Test a snapshot cannot be taken before the first update."""
    estimator = SensitivityEstimator()
    with pytest.raises(ContractError):
        estimator.snapshot(QuadraticModel([1.0]).quantizers())


def test_snapshot_validation():
    """Test snapshots reject negative weights and empty quantizers."""
    with pytest.raises(ContractError):
        SensitivitySnapshot(0, {"q": -1.0}, {"q": 1})
    with pytest.raises(ContractError):
        SensitivitySnapshot(0, {"q": 1.0}, {"q": 0})


def test_reset_forgets_state():
    """Test reset clears both values and observation counts."""
    estimator = SensitivityEstimator()
    estimator.observe("a", 1.0)
    estimator.observe("b", 2.0)
    estimator.reset(["a"])
    assert not estimator.is_initialized("a")
    assert estimator.is_initialized("b")
    estimator.reset()
    assert estimator.observation_count("b") == 0


def test_hessian_diagonal_of_a_quadratic():
    """Test the finite-difference diagonal recovers the curvature."""
    model = QuadraticModel([1.0, -2.0, 0.5], curvature=[3.0, 0.25, 7.0])
    np.testing.assert_allclose(hessian_diag_fd(model, batch=[0]), [3.0, 0.25, 7.0], rtol=1e-6)
    with pytest.raises(ContractError):
        hessian_diagonal(model.loss_fn([0]), model.flat_parameters(), epsilon=0.0)


def test_rank_correlation():
    """Test Spearman correlation on monotone and reversed vectors."""
    assert rank_correlation([1.0, 2.0, 3.0], [10.0, 20.0, 40.0]) == pytest.approx(1.0)
    assert rank_correlation([1.0, 2.0, 3.0], [3.0, 2.0, 1.0]) == pytest.approx(-1.0)
    with pytest.raises(ContractError):
        rank_correlation([1.0], [1.0])


def _logistic_dataset(samples, seed):
    rng = np.random.default_rng(seed)
    scales = np.array([0.25, 0.5, 1.0, 2.0, 4.0])
    features = rng.normal(size=(samples, scales.size)) * scales
    logits = features @ (0.5 / scales)
    labels = (rng.random(samples) < 1.0 / (1.0 + np.exp(-logits))).astype(np.int64)
    return Dataset(features, labels, num_classes=2)


def test_fit_ranks_parameters_like_the_hessian_diagonal():
    """Test EMA-smoothed FIT agrees in rank with the curvature of a fitted model."""
    dataset = _logistic_dataset(400, seed=21)
    model = LogisticRegressionModel(input_dim=5)
    model.fit(dataset, steps=300, learning_rate=0.1)

    estimator = SensitivityEstimator(gamma=0.02, update_period=1, clip=False)
    for index in range(len(dataset)):
        estimator.fit_update(model, dataset.subset(np.array([index])))

    agreement = fit_hessian_agreement(estimator, model, dataset)
    assert agreement["all"] >= 0.5
    assert agreement[LogisticRegressionModel.QUANTIZER_ID] == pytest.approx(agreement["all"])


def test_hessian_diagonal_of_a_bilinear_loss_is_zero():
    """Test L = theta_1 * theta_2 has no curvature along either coordinate."""

    def bilinear(theta: Tensor) -> Tensor:
        return reduce_sum(mul(slice_view(theta, slice(0, 1), (1,)), slice_view(theta, slice(1, 2), (1,))))

    np.testing.assert_allclose(hessian_diagonal(bilinear, [1.5, -0.7]), [0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(hessian_diagonal(bilinear, [-3.0, 4.0], epsilon=1e-2), [0.0, 0.0], atol=1e-12)


def test_hessian_diagonal_matches_nested_finite_differences():
    """Test the tape-based diagonal against differences of numerical gradients."""
    dataset = _logistic_dataset(16, seed=8)
    model = LogisticRegressionModel(input_dim=5)
    model.weight.data = np.random.default_rng(9).normal(scale=0.5, size=model.weight.shape)
    loss_fn = model.loss_fn(dataset)
    theta = model.flat_parameters()

    step = 1e-3
    nested = np.zeros_like(theta)
    for index in range(theta.size):
        upper, lower = theta.copy(), theta.copy()
        upper[index] += step
        lower[index] -= step
        nested[index] = (
            finite_difference_gradient(loss_fn, Tensor(upper))[index]
            - finite_difference_gradient(loss_fn, Tensor(lower))[index]
        ) / (2.0 * step)

    np.testing.assert_allclose(hessian_diag_fd(model, dataset), nested, atol=1e-3)
    assert np.all(nested >= 0.0)
