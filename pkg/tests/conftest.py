import numpy as np
import pytest

from ticketlab import full_mask, gen_synthetic, init_network


@pytest.fixture
def tiny_arch():
    return (3, 4, 2)


@pytest.fixture
def tiny_net(tiny_arch):
    return init_network(tiny_arch, seed=11)


@pytest.fixture
def tiny_mask(tiny_arch):
    return full_mask(tiny_arch)


@pytest.fixture
def blob_data():
    return gen_synthetic(3, 6, 60, seed=5, noise=0.15)


def networks_equal(a, b):
    """Bitwise equality of two DenseNetworks."""
    return all(np.array_equal(x, y) for x, y in zip(a.weights, b.weights)) and all(
        np.array_equal(x, y) for x, y in zip(a.biases, b.biases)
    )


def masks_equal(a, b):
    return all(np.array_equal(x, y) for x, y in zip(a.layers, b.layers))
