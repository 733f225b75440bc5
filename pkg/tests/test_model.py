import numpy as np
import pytest

from ska.model import (LayerState, Network, forward, init_network, load_checkpoint,
                       save_checkpoint, snapshot_norms)
from ska.tensor import ShapeError, frobenius_norm


def test_init_deterministic():
    a, b = init_network([6, 4, 3], seed=7), init_network([6, 4, 3], seed=7)
    for la, lb in zip(a.layers, b.layers):
        assert np.array_equal(la.weights, lb.weights)
        assert not la.bias.any()
        assert la.z is None


def test_four_layer_architecture():
    net = init_network([784, 128, 64, 32, 10], seed=0)
    assert net.n_layers == 4
    assert [lay.weights.shape for lay in net.layers] == [(128, 784), (64, 128), (32, 64), (10, 32)]


def test_init_std():
    w = init_network([100, 1000], seed=3).layers[0].weights
    assert w.std() == pytest.approx(0.1, rel=0.2)


@pytest.mark.parametrize("sizes", [[], [5], [5, 0, 3]])
def test_init_rejects_bad_sizes(sizes):
    with pytest.raises(ValueError):
        init_network(sizes, seed=0)


def test_incompatible_layers():
    with pytest.raises(ShapeError):
        Network([LayerState(np.zeros((3, 2)), np.zeros(3)), LayerState(np.zeros((1, 4)), np.zeros(1))])


def test_zero_weights_give_half():
    net = init_network([3, 4, 2], seed=0)
    for lay in net.layers:
        lay.weights[:] = 0.0
    out = forward(net, np.ones((5, 3)))
    assert out.shape == (5, 2) and np.all(out == 0.5)


def test_hand_computed_single_layer():
    net = Network([LayerState(np.array([[2.0, -1.0]]), np.array([0.5]))])
    out = forward(net, np.array([[1.0, 3.0]]))
    z = 2.0 * 1.0 - 1.0 * 3.0 + 0.5
    assert net.layers[0].z[0, 0] == z
    assert out[0, 0] == pytest.approx(1 / (1 + np.exp(-z)), rel=1e-15)


def test_state_bookkeeping(rng):
    net = init_network([4, 3, 2], seed=1)
    x = rng.uniform(size=(6, 4))
    forward(net, x)
    for lay in net.layers:
        assert not lay.delta_d.any()
    first = [lay.d.copy() for lay in net.layers]
    net.layers[0].weights += 0.1
    forward(net, x)
    for lay, d0 in zip(net.layers, first):
        assert np.array_equal(lay.d_prev, d0)
        assert np.array_equal(lay.delta_d, lay.d - d0)
        assert np.all((lay.d > 0) & (lay.d < 1))
    # unchanged weights: the next pass sees no shift
    forward(net, x)
    assert all(not lay.delta_d.any() for lay in net.layers)


def test_forward_rejects_wrong_input():
    with pytest.raises(ShapeError):
        forward(init_network([4, 2], seed=0), np.zeros((3, 5)))


def test_snapshot_norms(rng):
    net = init_network([4, 3, 2], seed=1)
    with pytest.raises(RuntimeError):
        snapshot_norms(net)
    forward(net, rng.uniform(size=(5, 4)))
    assert snapshot_norms(net) == [frobenius_norm(lay.z) for lay in net.layers]

    single = Network([LayerState(np.array([[3.0], [4.0]]), np.zeros(2))])
    forward(single, np.array([[1.0]]))
    assert snapshot_norms(single) == [5.0]

    zero = Network([LayerState(np.zeros((2, 2)), np.zeros(2))])
    forward(zero, np.ones((1, 2)))
    assert snapshot_norms(zero) == [0.0]


def test_checkpoint_round_trip(tmp_path, rng):
    net = init_network([5, 4, 3], seed=2)
    net.layers[1].bias = rng.normal(size=3)
    save_checkpoint(net, tmp_path / "ckpt.json")
    back = load_checkpoint(tmp_path / "ckpt.json")
    assert back.layer_sizes == [5, 4, 3]
    for a, b in zip(net.layers, back.layers):
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.bias, b.bias)


def test_checkpoint_rejects_foreign_file(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{"format": "other"}')
    with pytest.raises(ValueError):
        load_checkpoint(p)
