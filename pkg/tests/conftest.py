import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def finite_difference_gradient(fn, params, step=1e-5):
    """Central finite differences of a scalar function; independent gradient oracle."""
    params = np.asarray(params, dtype=float)
    grad = np.empty_like(params)
    for i in range(len(params)):
        p = params.copy()
        p[i] = params[i] + step
        fp = fn(p)
        p[i] = params[i] - step
        fm = fn(p)
        grad[i] = (fp - fm) / (2.0 * step)
    return grad
