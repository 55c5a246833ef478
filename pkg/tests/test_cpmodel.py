import json

import numpy as np
import pytest
from conftest import random_model

from tensorgpc import _accel
from tensorgpc.basis import BasisBundle
from tensorgpc.cpmodel import (
    CpModel,
    dense_basis,
    densify,
    evaluate,
    gradient,
    khatri_rao_row,
    prune_mask,
    prune_rank,
)
from tensorgpc.errors import SizeError
from tensorgpc.paramspace import ParameterSpace


def test_densify_outer_product():
    sp = ParameterSpace.uniform(2)
    F = np.zeros((2, 2, 1))
    F[0, :, 0] = [1, 2]
    F[1, :, 0] = [3, 4]
    assert np.array_equal(CpModel(F, sp).densify(), [[3, 4], [6, 8]])
    assert not densify(CpModel(np.zeros((2, 2, 3)), sp)).any()


@pytest.mark.parametrize("seed", range(5))
def test_dense_inner_product_equals_evaluate(seed, backend):
    rng = np.random.default_rng(seed)
    m = random_model(rng, 3, 2, 3)
    X = m.space.to_phys(rng.random((10, 3)))
    D = m.densify()
    for x in X:
        assert abs(np.sum(D * dense_basis(m.bases, x)) - evaluate(m, x)) < 1e-10


def test_densify_size_cap():
    m = CpModel(np.ones((20, 3, 1)), ParameterSpace.uniform(20))
    with pytest.raises(SizeError):
        m.densify()
    with pytest.raises(SizeError):
        dense_basis(m.bases, np.zeros(20) + 0.5)


@pytest.mark.parametrize("seed", range(5))
def test_gradient_matches_finite_differences(seed, backend):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 11))
    m = random_model(rng, d, int(rng.integers(1, 5)), int(rng.integers(1, 4)))
    x = m.space.to_phys(rng.uniform(0.1, 0.9, (1, d)))[0]
    g = gradient(m, x)
    h = 1e-5 * np.array([mg.scale for mg in m.space.marginals])
    fd = np.array([(m.evaluate(x + h[k] * e) - m.evaluate(x - h[k] * e)) / (2 * h[k])
                   for k, e in enumerate(np.eye(d))])
    assert np.allclose(g, fd, rtol=1e-5, atol=1e-5 * np.abs(fd).max())


def test_gradient_batch_matches_single(rng):
    m = random_model(rng, 4, 3, 2)
    X = m.space.to_phys(rng.random((7, 4)))
    G = m.gradient_batch(X)
    for i in range(7):
        assert np.allclose(G[i], m.gradient(X[i]))


@pytest.mark.parametrize("k", [0, 1, 2])
def test_khatri_rao_row_matches_dense_unfolding(k, rng):
    m = random_model(rng, 3, 2, 2)
    x = m.space.to_phys(rng.random((1, 3)))[0]
    B = np.moveaxis(dense_basis(m.bases, x), k, 0).reshape(3, -1)
    others = [j for j in range(3) if j != k]
    # Khatri-Rao of the remaining factors in the same (C-order) layout
    kr = np.einsum("ar,br->abr", m.factors[others[0]], m.factors[others[1]]).reshape(-1, 2)
    assert np.allclose(khatri_rao_row(m, k, x), B @ kr, atol=1e-12)
    # and the model value is recovered from the reduced row
    assert abs(np.sum(khatri_rao_row(m, k, x) * m.factors[k]) - m.evaluate(x)) < 1e-10


def test_prune_examples():
    sp = ParameterSpace.uniform(2)
    F = np.zeros((2, 2, 2))
    F[:, 0, 0] = np.sqrt(12.5)
    F[0, 0, 1] = 1e-9
    m = CpModel(F, sp)
    assert prune_rank(m, 1e-4).rank == 1
    eq = CpModel(np.ones((2, 2, 3)), sp)
    assert prune_rank(eq, 1e-4).rank == 3
    assert prune_rank(m, 0.0) is m
    z = CpModel(np.zeros((2, 2, 2)), sp)
    assert prune_mask(z.factors, 1e-4).all()


def test_prune_keeps_largest_when_all_small():
    F = np.ones((1, 1, 3)) * np.array([1.0, 2.0, 3.0])
    keep = prune_mask(F, 0.999999)
    assert keep.tolist() == [False, False, True]


def test_prune_preserves_values(rng):
    m = random_model(rng, 5, 2, 2)
    F = np.concatenate([m.factors, 1e-8 * rng.standard_normal((5, 3, 2))], axis=2)
    big = CpModel(F, m.space)
    X = m.space.to_phys(rng.random((100, 5)))
    y0 = big.predict(X)
    y1 = big.prune_rank(1e-4).predict(X)
    assert big.prune_rank(1e-4).rank == 2
    assert np.linalg.norm(y0 - y1) <= 1e-6 * np.linalg.norm(y0)


def test_constant_model():
    sp = ParameterSpace.uniform(3)
    m = CpModel.constant(sp, 2, value=4.5, rank=2)
    assert np.allclose(m.predict(sp.sample(5, 0).phys), 4.5)


def test_model_validation():
    sp = ParameterSpace.uniform(2)
    with pytest.raises(ValueError):
        CpModel(np.ones((3, 2, 1)), sp)
    with pytest.raises(ValueError):
        CpModel(np.ones((2, 2, 0)), sp)
    with pytest.raises(ValueError):
        CpModel(np.ones((2, 2)), sp)
    with pytest.raises(ValueError):
        CpModel(np.ones((2, 3, 1)), sp, bases=BasisBundle(sp, 1))


def test_factors_read_only(rng):
    m = random_model(rng, 2, 2, 2)
    with pytest.raises(ValueError):
        m.factors[0, 0, 0] = 1.0


def test_json_round_trip(tmp_path, rng):
    m = random_model(rng, 3, 2, 2)
    m.fit_meta.update({"seed": 3, "q": 0.5, "lambda0": 0.1, "objective_trace_tail": [1.0]})
    path = tmp_path / "m.json"
    m.save(path)
    obj = json.loads(path.read_text())
    assert set(obj) == {"version", "degree", "rank", "marginals", "factors", "fit_meta"}
    back = CpModel.load(path)
    assert np.array_equal(back.factors, m.factors)
    assert back.space == m.space
    assert back.to_json() == m.to_json()
    obj["rank"] = 5
    with pytest.raises(ValueError):
        CpModel.from_dict(obj)
    obj["version"] = 99
    with pytest.raises(ValueError):
        CpModel.from_dict(obj)


def test_predict_batches_consistent(rng, monkeypatch):
    m = random_model(rng, 3, 2, 2)
    X = m.space.to_phys(rng.random((50, 3)))
    full = m.predict(X)
    monkeypatch.setattr("tensorgpc.cpmodel._BATCH", 7)
    assert np.array_equal(m.predict(X), full)


def test_backends_agree_on_model(rng, monkeypatch):
    m = random_model(rng, 6, 3, 3)
    X = m.space.to_phys(rng.random((40, 6)))
    monkeypatch.delenv(_accel.ENV_FLAG, raising=False)
    a, ga = m.predict(X), m.gradient_batch(X)
    monkeypatch.setenv(_accel.ENV_FLAG, "1")
    b, gb = m.predict(X), m.gradient_batch(X)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)
    assert np.allclose(ga, gb, rtol=1e-12, atol=1e-12)
