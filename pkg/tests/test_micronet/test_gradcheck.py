"""Backprop gradients checked against central differences."""

import numpy as np
import pytest

from src.errors import ConfigError
from src.micronet import build_network, grad_check
from src.micronet.gradcheck import relative_error
from src.models.network import NetworkSpec


def _batch(seed: int) -> tuple[list[np.ndarray], list[int]]:
    rng = np.random.default_rng(seed)
    batch = [rng.normal(size=(frames, 2, 16, 12)) for frames in (1, 2, 3)]
    return batch, [0, 1, 1]


def test_cnn_gradients(tiny_cnn_spec: NetworkSpec) -> None:
    batch, labels = _batch(1)
    result = grad_check(build_network(tiny_cnn_spec), batch, labels, n_params=100)
    assert result.n_checked == 100
    assert result.max_relative_error < 1e-3


def test_cnn_blstm_gradients(tiny_blstm_spec: NetworkSpec) -> None:
    batch, labels = _batch(2)
    result = grad_check(build_network(tiny_blstm_spec), batch, labels, n_params=100)
    assert result.n_checked == 100
    assert result.max_relative_error < 1e-3


def test_gradient_keys_match_parameters(tiny_blstm_spec: NetworkSpec) -> None:
    network = build_network(tiny_blstm_spec)
    batch, labels = _batch(3)
    loss, grads = network.loss_and_grads(batch, labels)
    assert loss > 0
    assert set(grads) == set(network.params)
    for name, grad in grads.items():
        assert grad.shape == network.params[name].shape


def test_float32_network_is_rejected(tiny_cnn_spec: NetworkSpec) -> None:
    network = build_network(tiny_cnn_spec.model_copy(update={"dtype": "float32"}))
    batch, labels = _batch(4)
    with pytest.raises(ConfigError):
        grad_check(network, batch, labels)


def test_relative_error_floor() -> None:
    assert relative_error(0.0, 0.0) == 0.0
    assert relative_error(1.0, 1.001) == pytest.approx(0.001 / 1.001)
