import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorgpc.errors import DomainError
from tensorgpc.paramspace import (
    Gaussian,
    ParameterSpace,
    SampleSet,
    Uniform,
    inverse_transform,
    latin_hypercube,
    make_rng,
    marginal_from_dict,
    mc_uniform,
    read_samples_csv,
    write_samples_csv,
)


def _is_stratified(u):
    n = u.shape[0]
    bins = np.floor(u * n).astype(int)
    return all(sorted(bins[:, k]) == list(range(n)) for k in range(u.shape[1]))


def test_lh_four_points_one_per_quarter():
    u = latin_hypercube(4, 1, seed=3)
    assert sorted(np.floor(u[:, 0] * 4).astype(int)) == [0, 1, 2, 3]


def test_lh_single_row():
    u = latin_hypercube(1, 3, seed=0)
    assert u.shape == (1, 3)
    assert np.all((u >= 0) & (u < 1))


def test_lh_200_by_100_stratified():
    u = latin_hypercube(200, 100, seed=7)
    hist = np.stack([np.bincount(np.floor(u[:, k] * 200).astype(int), minlength=200)
                     for k in range(100)])
    assert np.all(hist == 1)


def test_lh_deterministic_and_seed_sensitive():
    a = latin_hypercube(50, 4, seed=11)
    assert np.array_equal(a, latin_hypercube(50, 4, seed=11))
    assert not np.array_equal(a, latin_hypercube(50, 4, seed=12))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 300), d=st.integers(1, 6), seed=st.integers(0, 2**32))
def test_lh_stratification_property(n, d, seed):
    u = latin_hypercube(n, d, seed)
    assert u.shape == (n, d)
    assert np.all((u > 0) & (u < 1))
    assert _is_stratified(u)


def test_lh_rejects_bad_sizes():
    with pytest.raises(ValueError):
        latin_hypercube(0, 2, 0)


def test_inverse_transform_examples():
    assert inverse_transform(ParameterSpace((Uniform(1, 2),)), np.array([0.5]))[0] == 1.5
    g = ParameterSpace((Gaussian(0, 1),))
    assert inverse_transform(g, np.array([0.5]))[0] == 0.0
    assert abs(inverse_transform(g, np.array([0.975]))[0] - 1.959963984540054) < 1e-9


def test_inverse_transform_gaussian_endpoints_raise():
    g = ParameterSpace((Gaussian(0, 1),))
    for u in (0.0, 1.0):
        with pytest.raises(DomainError):
            inverse_transform(g, np.array([u]))


def test_inverse_transform_uniform_endpoints_allowed():
    sp = ParameterSpace((Uniform(-1, 3),))
    assert inverse_transform(sp, np.array([0.0]))[0] == -1
    assert inverse_transform(sp, np.array([1.0]))[0] == 3


def test_inverse_transform_outside_unit_raises():
    with pytest.raises(DomainError):
        inverse_transform(ParameterSpace((Uniform(0, 1),)), np.array([1.5]))


@settings(max_examples=50, deadline=None)
@given(lo=st.floats(-10, 10), width=st.floats(0.1, 100),
       u=st.lists(st.floats(0, 1), min_size=1, max_size=20))
def test_uniform_round_trip_and_monotone(lo, width, u):
    m = Uniform(lo, lo + width)
    u = np.array(u)
    x = m.quantile(u)
    # conditioning |lo| / width stays <= 100 here, so 1e-12 is attainable
    assert np.allclose(m.cdf(x), u, atol=1e-12, rtol=0)
    order = np.argsort(u, kind="stable")
    assert np.all(np.diff(x[order]) >= 0)


def test_gaussian_quantile_monotone_and_round_trip():
    m = Gaussian(2.0, 3.0)
    u = np.linspace(1e-6, 1 - 1e-6, 1001)
    x = m.quantile(u)
    assert np.all(np.diff(x) > 0)
    assert np.allclose(m.cdf(x), u, atol=1e-12)


def test_marginal_validation():
    with pytest.raises(ValueError):
        Uniform(1, 1)
    with pytest.raises(ValueError):
        Gaussian(0, 0)
    with pytest.raises(ValueError):
        marginal_from_dict({"kind": "beta"})
    assert marginal_from_dict(Uniform(1, 2).to_dict()) == Uniform(1, 2)
    assert marginal_from_dict(Gaussian(1, 2).to_dict()) == Gaussian(1, 2)


def test_mc_uniform_examples():
    a = mc_uniform(3, 2, seed=5)
    assert np.array_equal(a, mc_uniform(3, 2, seed=5))
    big = mc_uniform(20000, 2, seed=1)
    assert np.all(np.abs(big.mean(axis=0) - 0.5) < 0.01)
    one = mc_uniform(1, 1, seed=0)
    assert one.shape == (1, 1) and 0 <= one[0, 0] < 1


def test_streams_are_independent():
    a = make_rng(1, 1).random(5)
    b = make_rng(1, 2).random(5)
    c = make_rng(1, 1, 0).random(5)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.array_equal(a, make_rng(1, 1).random(5))


def test_space_round_trip_and_dict():
    sp = ParameterSpace((Uniform(1, 3), Gaussian(0, 2)))
    assert ParameterSpace.from_dict(sp.to_dict()) == sp
    u = mc_uniform(100, 2, seed=3)
    assert np.allclose(sp.to_unit(sp.to_phys(u)), u, atol=1e-12)
    with pytest.raises(ValueError):
        ParameterSpace(())


def test_sample_set_invariants():
    sp = ParameterSpace.uniform(3, -1, 1)
    s = sp.sample(10, seed=2)
    assert np.allclose(s.phys, sp.to_phys(s.unit), atol=1e-12)
    assert not s.labeled and s.missing_labels() == list(range(10))
    lab = s.with_outputs(np.arange(10.0))
    assert lab.labeled
    both = lab.extend(sp.sample(2, seed=3))
    assert len(both) == 12 and both.missing_labels() == [10, 11]
    with pytest.raises(ValueError):
        SampleSet(np.zeros((2, 2)), np.zeros((3, 2)))
    with pytest.raises(ValueError):
        SampleSet(np.zeros((2, 2)), np.zeros((2, 2)), np.zeros(3))


def test_samples_csv_round_trip(tmp_path):
    sp = ParameterSpace((Uniform(1, 2), Gaussian(0, 1)))
    s = sp.sample(5, seed=0)
    y = np.array([1.5, np.nan, -2.0, 1e-300, 3.0])
    path = tmp_path / "s.csv"
    write_samples_csv(path, s.with_outputs(y))
    text = path.read_text().splitlines()
    assert text[0] == "u_1,u_2,x_1,x_2,y"
    assert text[2].endswith(",")
    back = read_samples_csv(path)
    assert np.array_equal(back.unit, s.unit) and np.array_equal(back.phys, s.phys)
    assert np.array_equal(np.isnan(back.outputs), np.isnan(y))
    assert np.array_equal(back.outputs[~np.isnan(y)], y[~np.isnan(y)])


def test_samples_csv_validation(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,y\n1,2,3\n")
    with pytest.raises(ValueError):
        read_samples_csv(p)
    p.write_text("u_1,x_1,y\n0.5,1.5\n")
    with pytest.raises(ValueError, match="line 2"):
        read_samples_csv(p)
