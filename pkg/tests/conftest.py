import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_skew(rng, n, size=None):
    shape = (n, n) if size is None else (size, n, n)
    X = rng.normal(size=shape)
    return X - np.swapaxes(X, -1, -2)
