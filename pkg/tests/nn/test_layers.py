"""Tests for individual layers: shapes and finite-difference gradients."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from roomsense.errors import ShapeMismatch
from roomsense.nn.layers import (
    GRU,
    Activation,
    BatchNorm,
    Conv2D,
    Dense,
    Dropout,
    GlobalFlatten,
    MaxPool2D,
    TimeFlatten,
)


def build(layer, shape, seed=0):
    layer.build(shape, np.random.default_rng(seed), np.float64)
    return layer


def check_gradients(layer, x, seed=1, eps=1e-6, tol=1e-6):
    """Compare analytic input and parameter gradients of sum(w * y) with central differences."""
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(layer.forward(x, training=True).shape)

    def loss():
        return float(np.sum(w * layer.forward(x, training=True)))

    layer.zero_grad()
    layer.forward(x, training=True)
    dx = layer.backward(w)

    targets = {"x": (x, dx), **{k: (v, layer.grads[k]) for k, v in layer.params.items()}}
    for name, (array, analytic) in targets.items():
        flat = array.reshape(-1)
        numeric = np.empty(flat.size)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            up = loss()
            flat[i] = original - eps
            down = loss()
            flat[i] = original
            numeric[i] = (up - down) / (2 * eps)
        assert_allclose(analytic.reshape(-1), numeric, rtol=tol, atol=tol, err_msg=name)


class TestDense:
    """Tests for Dense."""

    def test_forward(self):
        """Test y = x W + b."""
        layer = build(Dense(2), (3,))
        layer.params["W"] = np.arange(6.0).reshape(3, 2)
        layer.params["b"] = np.array([1.0, -1.0])

        assert_allclose(layer.forward(np.array([[1.0, 0.0, 2.0]])), [[9.0, 10.0]])

    def test_gradients(self, rng):
        """Test analytic gradients match finite differences."""
        layer = build(Dense(4), (5,))
        check_gradients(layer, rng.standard_normal((3, 5)))

    def test_needs_vectors(self):
        """Test a map input is refused."""
        with pytest.raises(ShapeMismatch):
            build(Dense(4), (5, 2))


class TestConv2D:
    """Tests for Conv2D."""

    def test_same_padding(self):
        """Test the output keeps time and frequency extents."""
        assert build(Conv2D(3, 7), (9, 5, 2)).output_shape == (9, 5, 7)

    def test_identity_kernel(self, rng):
        """Test a centred unit kernel copies the input."""
        layer = build(Conv2D(3, 1), (4, 4, 1))
        layer.params["W"] = np.zeros((3, 3, 1, 1))
        layer.params["W"][1, 1, 0, 0] = 1.0
        x = rng.standard_normal((2, 4, 4, 1))

        assert_allclose(layer.forward(x), x)

    def test_gradients(self, rng):
        """Test analytic gradients match finite differences."""
        layer = build(Conv2D(3, 2), (5, 4, 2))
        check_gradients(layer, rng.standard_normal((2, 5, 4, 2)))

    def test_even_kernel(self):
        """Test even kernels are refused."""
        with pytest.raises(ValueError):
            Conv2D(4, 2)


class TestBatchNorm:
    """Tests for BatchNorm."""

    def test_training_normalizes(self, rng):
        """Test batch statistics give zero mean and unit variance per channel."""
        layer = build(BatchNorm(), (6, 3))
        y = layer.forward(rng.normal(5.0, 3.0, size=(50, 6, 3)), training=True)

        assert_allclose(y.mean(axis=(0, 1)), 0.0, atol=1e-9)
        assert_allclose(y.var(axis=(0, 1)), 1.0, rtol=1e-3)

    def test_running_statistics(self):
        """Test running statistics move by (1 - momentum) toward the batch."""
        layer = build(BatchNorm(momentum=0.9), (1,))
        layer.forward(np.array([[2.0], [4.0]]), training=True)

        assert layer.buffers["running_mean"][0] == pytest.approx(0.3)
        assert layer.buffers["running_var"][0] == pytest.approx(0.9 * 1.0 + 0.1 * 1.0)

    def test_gradients(self, rng):
        """Test analytic gradients match finite differences."""
        layer = build(BatchNorm(), (3, 2))
        layer.params["gamma"] = rng.uniform(0.5, 1.5, size=2)
        layer.params["beta"] = rng.standard_normal(2)
        check_gradients(layer, rng.standard_normal((4, 3, 2)), tol=1e-5)


class TestActivation:
    """Tests for Activation."""

    def test_values(self):
        """Test ReLU and ELU values."""
        x = np.array([[-1.0, 0.0, 2.0]])

        assert_allclose(build(Activation("relu"), (3,)).forward(x), [[0.0, 0.0, 2.0]])
        assert_allclose(build(Activation("elu"), (3,)).forward(x), [[np.expm1(-1.0), 0.0, 2.0]])

    def test_elu_gradients(self, rng):
        """Test ELU gradients match finite differences away from zero."""
        x = rng.standard_normal((3, 4))
        x[np.abs(x) < 0.05] = 0.5
        check_gradients(build(Activation("elu"), (4,)), x)

    def test_unknown(self):
        """Test unknown functions are refused."""
        with pytest.raises(ValueError):
            Activation("tanh")


class TestMaxPool2D:
    """Tests for MaxPool2D."""

    def test_pools_and_drops_odd_edges(self):
        """Test 2x2 maxima and truncation of odd extents."""
        layer = build(MaxPool2D(), (5, 4, 1))
        x = np.arange(20.0).reshape(1, 5, 4, 1)

        y = layer.forward(x)

        assert y.shape == (1, 2, 2, 1)
        assert_allclose(y[0, :, :, 0], [[5.0, 7.0], [13.0, 15.0]])

    def test_gradients(self, rng):
        """Test gradients route to the maxima."""
        layer = build(MaxPool2D(), (4, 6, 2))
        check_gradients(layer, rng.standard_normal((2, 4, 6, 2)))

    def test_too_small(self):
        """Test maps smaller than 2x2 are refused."""
        with pytest.raises(ShapeMismatch):
            build(MaxPool2D(), (1, 4, 1))


class TestDropout:
    """Tests for Dropout."""

    def test_identity_at_inference(self, rng):
        """Test inference and disabled dropout pass inputs through."""
        layer = build(Dropout(0.5), (10,))
        x = rng.standard_normal((4, 10))

        assert_allclose(layer.forward(x), x)
        layer.enabled = False
        assert_allclose(layer.forward(x, training=True), x)

    def test_inverted_scaling(self):
        """Test kept units are scaled by 1 / keep and the mean is preserved."""
        layer = build(Dropout(0.2), (1000,))
        y = layer.forward(np.ones((50, 1000)), training=True)

        assert set(np.unique(y)) <= {0.0, 1.25}
        assert y.mean() == pytest.approx(1.0, rel=0.02)

    def test_bad_probability(self):
        """Test p must be in [0, 1)."""
        with pytest.raises(ValueError):
            Dropout(1.0)


class TestFlatten:
    """Tests for TimeFlatten and GlobalFlatten."""

    def test_time_flatten(self, rng):
        """Test frames keep their order and channels are merged with frequency."""
        layer = build(TimeFlatten(), (3, 2, 4))
        x = rng.standard_normal((2, 3, 2, 4))

        assert layer.output_shape == (3, 8)
        assert_allclose(layer.forward(x)[1, 2], x[1, 2].reshape(-1))

    def test_global_flatten_gradients(self, rng):
        """Test global averaging and its gradient."""
        layer = build(GlobalFlatten(), (3, 2, 4))
        x = rng.standard_normal((2, 3, 2, 4))

        assert_allclose(layer.forward(x), x.mean(axis=(1, 2)))
        check_gradients(layer, x)


class TestGRU:
    """Tests for GRU."""

    def test_shapes(self):
        """Test sequence and last-state outputs."""
        assert build(GRU(5, return_sequences=True), (7, 3)).output_shape == (7, 5)
        assert build(GRU(5), (7, 3)).output_shape == (5,)

    def test_last_state_matches_sequence(self, rng):
        """Test the final state equals the last element of the sequence output."""
        seq = build(GRU(4, return_sequences=True), (6, 3), seed=2)
        last = build(GRU(4), (6, 3), seed=2)
        x = rng.standard_normal((2, 6, 3))

        assert_allclose(last.forward(x), seq.forward(x)[:, -1])

    @pytest.mark.parametrize("return_sequences", [True, False])
    def test_gradients_over_seven_steps(self, rng, return_sequences):
        """Test backpropagation through time matches finite differences."""
        layer = build(GRU(4, return_sequences=return_sequences), (7, 3))
        layer.params["b"] = rng.standard_normal(12) * 0.5
        check_gradients(layer, rng.standard_normal((2, 7, 3)), tol=1e-5)
