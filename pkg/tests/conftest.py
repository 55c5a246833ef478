import numpy as np
import pytest

from tensorgpc import _accel
from tensorgpc.cpmodel import CpModel
from tensorgpc.paramspace import Gaussian, ParameterSpace, Uniform


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run a test once per kernel backend."""
    if request.param == "numpy":
        monkeypatch.setenv(_accel.ENV_FLAG, "1")
    else:
        monkeypatch.delenv(_accel.ENV_FLAG, raising=False)
    assert _accel.backend() == request.param
    return request.param


def random_space(rng, d):
    marg = []
    for _ in range(d):
        if rng.random() < 0.5:
            lo = rng.uniform(-2, 1)
            marg.append(Uniform(lo, lo + rng.uniform(0.5, 3)))
        else:
            marg.append(Gaussian(rng.uniform(-1, 1), rng.uniform(0.5, 2)))
    return ParameterSpace(tuple(marg))


def random_model(rng, d, p, R, space=None, scale=0.5):
    space = random_space(rng, d) if space is None else space
    F = rng.standard_normal((d, p + 1, R)) * scale
    F[:, 0, :] += 1.0
    return CpModel(F, space)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
