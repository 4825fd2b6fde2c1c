"""
Tests for the tape-based reverse-mode differentiation layer.
"""

import os
import sys

import numpy as np
import pytest

# Add the project root to the path
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

from mixed_precision.autodiff import (  # noqa: E402
    GradientPolicy,
    Tape,
    Tensor,
    backward,
    bias_add,
    clamp,
    finite_difference_gradient,
    grad_check,
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
    tape_gradient,
)
from mixed_precision.errors import ContractError, DimensionError  # noqa: E402


def test_product_rule_on_scalars():
    """Test d(x*y)/dx = y and d(x*y)/dy = x."""
    x = Tensor(3.0, requires_grad=True)
    y = Tensor(-2.0, requires_grad=True)
    with Tape():
        z = mul(x, y)
        backward(z)
    assert x.grad == pytest.approx(-2.0)
    assert y.grad == pytest.approx(3.0)


def test_fan_out_accumulates_gradients():
    """Test that a tensor used twice receives the sum of both paths."""
    x = Tensor(2.0, requires_grad=True)
    with Tape():
        y = x * x + x
        backward(y)
    assert x.grad == pytest.approx(5.0)


def test_untracked_constants_get_no_gradient():
    """Test that constants stay gradient-free."""
    x = Tensor([1.0, 2.0], requires_grad=True)
    c = Tensor([3.0, 4.0])
    with Tape():
        backward(reduce_sum(mul(x, c)))
    assert c.grad is None
    np.testing.assert_allclose(x.grad, [3.0, 4.0])


def test_backward_requires_scalar_loss():
    """Test that backward refuses a non-scalar output."""
    x = Tensor([1.0, 2.0], requires_grad=True)
    with Tape():
        y = mul(x, 2.0)
        with pytest.raises(ContractError):
            backward(y)


def test_backward_outside_tape_is_a_contract_error():
    """Test that a loss computed without a tape cannot be differentiated."""
    x = Tensor(1.0, requires_grad=True)
    y = mul(x, 2.0)
    with pytest.raises(ContractError):
        backward(y)


def test_matmul_shape_mismatch_raises_dimension_error():
    """Test that non-conforming operands are rejected."""
    with pytest.raises(DimensionError) as excinfo:
        matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))
    assert excinfo.value.left_shape == (2, 3)


def test_relu_gradient_masks_negative_inputs():
    """Test that ReLU passes gradients only for positive inputs."""
    x = Tensor([-1.0, 0.5, 2.0], requires_grad=True)
    with Tape():
        backward(reduce_sum(relu(x)))
    np.testing.assert_array_equal(x.grad, [0.0, 1.0, 1.0])


def test_round_policies():
    """Test exact rounding has zero gradient and the straight-through variant passes it."""
    x = Tensor([0.4, 1.6], requires_grad=True)
    with Tape():
        backward(reduce_sum(round_(x, GradientPolicy.EXACT)))
    np.testing.assert_array_equal(x.grad, [0.0, 0.0])

    x.zero_grad()
    with Tape():
        y = round_ste(x)
        backward(reduce_sum(y))
    np.testing.assert_array_equal(y.data, [0.0, 2.0])
    np.testing.assert_array_equal(x.grad, [1.0, 1.0])


def test_clamp_policies():
    """Test the three clamp gradient policies at and beyond the bounds."""
    values = [-2.0, -1.0, 0.0, 1.0, 2.0]
    expected = {
        GradientPolicy.EXACT: [0.0, 0.0, 1.0, 0.0, 0.0],
        GradientPolicy.STRAIGHT_THROUGH: [0.0, 1.0, 1.0, 1.0, 0.0],
        GradientPolicy.IDENTITY: [1.0, 1.0, 1.0, 1.0, 1.0],
    }
    for policy, grad in expected.items():
        x = Tensor(values, requires_grad=True)
        with Tape():
            y = clamp(x, -1.0, 1.0, policy)
            backward(reduce_sum(y))
        np.testing.assert_array_equal(y.data, [-1.0, -1.0, 0.0, 1.0, 1.0])
        np.testing.assert_array_equal(x.grad, grad)


def test_softmax_cross_entropy_gradient():
    """Test the cross-entropy gradient equals (softmax - onehot) / N."""
    logits = Tensor([[1.0, 2.0, 0.5], [0.0, -1.0, 3.0]], requires_grad=True)
    labels = [1, 2]
    with Tape():
        loss = softmax_cross_entropy(logits, labels)
        backward(loss)
    probs = np.exp(logits.data) / np.exp(logits.data).sum(axis=1, keepdims=True)
    onehot = np.eye(3)[labels]
    np.testing.assert_allclose(logits.grad, (probs - onehot) / 2.0, rtol=1e-12)
    expected = -np.mean(np.log(probs[[0, 1], labels]))
    assert loss.item() == pytest.approx(expected)


def test_softmax_cross_entropy_rejects_out_of_range_labels():
    """Test that labels must index a logit column."""
    with pytest.raises(ContractError):
        softmax_cross_entropy(Tensor(np.zeros((1, 2))), [2])


def test_slice_view_scatters_gradient_back():
    """Test that a reshaped view sends its gradient to the right flat positions."""
    theta = Tensor(np.arange(6.0), requires_grad=True)
    with Tape():
        view = slice_view(theta, slice(2, 6), (2, 2))
        backward(reduce_sum(square(view)))
    np.testing.assert_array_equal(view.data, [[2.0, 3.0], [4.0, 5.0]])
    np.testing.assert_allclose(theta.grad, [0.0, 0.0, 4.0, 6.0, 8.0, 10.0])


def test_dense_layer_matches_finite_differences():
    """Test a small dense network against central finite differences."""
    rng = np.random.default_rng(7)
    features = Tensor(rng.normal(size=(5, 3)))
    bias = Tensor(rng.normal(size=4))
    labels = rng.integers(0, 4, size=5)

    def loss_fn(weight: Tensor) -> Tensor:
        return softmax_cross_entropy(bias_add(matmul(features, weight), bias), labels)

    point = Tensor(rng.normal(size=(3, 4)))
    assert grad_check(loss_fn, point) < 1e-4


def test_finite_difference_gradient_of_mean_square():
    """Test the finite-difference helper on a closed-form gradient."""
    point = Tensor([1.0, -2.0, 3.0])
    numeric = finite_difference_gradient(lambda x: mean(square(x)), point)
    np.testing.assert_allclose(numeric, 2.0 * point.data / 3.0, rtol=1e-6)
    np.testing.assert_allclose(tape_gradient(lambda x: mean(square(x)), point), numeric, rtol=1e-6)


def test_nested_tapes_record_on_the_innermost():
    """Test that an inner tape does not leak records into the outer one."""
    x = Tensor(2.0, requires_grad=True)
    with Tape() as outer:
        with Tape() as inner:
            backward(mul(x, x))
        assert len(inner) == 1
        assert len(outer) == 0
    assert x.grad == pytest.approx(4.0)


def test_two_layer_relu_network_matches_finite_differences():
    """Test gradients through matmul, bias, ReLU and cross entropy over all parameters."""
    rng = np.random.default_rng(11)
    features = Tensor(rng.normal(size=(6, 3)))
    labels = rng.integers(0, 2, size=6)
    shapes = [(3, 5), (5,), (5, 2), (2,)]
    bounds = np.cumsum([0] + [int(np.prod(shape)) for shape in shapes])

    def loss_fn(theta: Tensor) -> Tensor:
        w1, b1, w2, b2 = (
            slice_view(theta, slice(start, stop), shape)
            for start, stop, shape in zip(bounds[:-1], bounds[1:], shapes)
        )
        hidden = relu(bias_add(matmul(features, w1), b1))
        return softmax_cross_entropy(bias_add(matmul(hidden, w2), b2), labels)

    point = Tensor(rng.normal(size=int(bounds[-1])))
    assert grad_check(loss_fn, point) < 1e-4
