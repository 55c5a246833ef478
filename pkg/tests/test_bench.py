import json
from dataclasses import replace

import numpy as np
import pytest

from tensorgpc import bench
from tensorgpc.errors import DomainError, ZeroNormError
from tensorgpc.paramspace import ParameterSpace, SampleSet, latin_hypercube
from tensorgpc.solver import fit
from tensorgpc.basis import BasisBundle


def test_synthetic_at_all_ones():
    k_sum = 5050.0
    expected = 3 - 5 / 100 * k_sum + k_sum / 100 + 1 + 1 - 1 + 1 + 1 + np.log(2 * k_sum / 300)
    assert bench.synthetic_100(np.ones(100)) == pytest.approx(expected, rel=1e-14)


def test_synthetic_domain():
    x = np.full(100, 1.5)
    x[19] = 2.9  # input 20 lives on [1, 3]
    bench.synthetic_100(x)
    x[0] = 2.1
    with pytest.raises(DomainError):
        bench.synthetic_100(x)
    with pytest.raises(ValueError):
        bench.synthetic_100_batch(np.ones((2, 99)))


def test_synthetic_mean_against_moments():
    # polynomial part from uniform moments, log part bounded by Jensen
    e1, e2, e3, e4 = 1.5, 7 / 3, 3.75, 6.2
    f1, f2, f3, f4 = 2.0, 13 / 3, 10.0, 24.2  # input 20 on [1, 3]
    k = np.arange(1, 101.0)
    m1 = np.full(100, e1); m1[19] = f1
    m3 = np.full(100, e3); m3[19] = f3
    m24 = np.full(100, e2 + e4); m24[19] = f2 + f4
    poly = 3 - 0.05 * k @ m1 + 0.01 * k @ m3 + e1 * e2 + e1 * e1 - e1 * e1 + e1 + e1 * e2
    assert poly == pytest.approx(-177.125)
    jensen = np.log(k @ m24 / 300)
    b = bench.synthetic_100_benchmark()
    n = 10**5
    mu, sd = bench.mc_truth(b, n, 0)
    se = sd / np.sqrt(n)
    assert poly + jensen - 0.05 - 4 * se < mu < poly + jensen + 4 * se
    assert abs(mu - (-162.95)) > 5


def test_relative_l2():
    assert bench.relative_l2([1, 2], [1, 2]) == 0
    assert bench.relative_l2([0, 0], [3, 4]) == pytest.approx(1.0)
    assert bench.relative_l2([3, 5], [3, 4]) == pytest.approx(0.2)
    with pytest.raises(ZeroNormError):
        bench.relative_l2([1, 1], [0, 0])
    with pytest.raises(ValueError):
        bench.relative_l2([1], [1, 2])


def _fn_benchmark(f, d=3):
    return bench.Benchmark(name="t", space=ParameterSpace.uniform(d, 0, 1), f=f)


def test_sobol_oracle_additive_and_single():
    S, T = bench.mc_sobol_oracle(_fn_benchmark(lambda X: X[:, 0] + X[:, 1]), 20000, 0)
    assert np.allclose(S, [0.5, 0.5, 0], atol=0.03) and np.allclose(T, [0.5, 0.5, 0], atol=0.03)
    S, T = bench.mc_sobol_oracle(_fn_benchmark(lambda X: 5 + X[:, 0] ** 2), 20000, 1)
    assert np.allclose(S, [1, 0, 0], atol=0.03) and np.allclose(T, [1, 0, 0], atol=0.03)
    with pytest.raises(ValueError):
        bench.mc_sobol_oracle(_fn_benchmark(lambda X: X[:, 0]), 10, 0)


def test_planted_generator():
    F = bench.planted_factors(3, 2, seed=4)
    assert F.shape == (3, 3, 2)
    assert np.allclose(F[1:, 0, :], 1.0) and np.allclose(F[0, 0], [3.0, -2.1])
    assert np.all(np.abs(F[1:, 1:]) <= bench.planted_amplitude(3))
    assert np.array_equal(F, bench.planted_factors(3, 2, seed=4))
    assert bench.planted_sample_count(10, 2) == 240


def test_zero_batches_equals_one_shot_fit():
    b = bench.planted_benchmark(3, 1, seed=0)
    cfg = b.solver_config()
    rep = bench.run_adaptive_experiment(b, cfg, bench.Schedule(36), seed=2, polish=False,
                                        n_test=2000)
    data = SampleSet.from_unit(b.space, latin_hypercube(36, 3, 2))
    data = data.with_outputs(b(data.phys))
    model, _ = fit(data, b.space, BasisBundle(b.space, 2), replace(cfg, seed=2))
    assert np.array_equal(rep.model.factors, model.factors)
    assert len(rep.rounds) == 1 and rep.rounds[0]["n_train"] == 36


def test_adaptive_experiment_planted(tmp_path):
    b = bench.planted_benchmark(3, 2, seed=1)
    n = bench.planted_sample_count(3, 2)
    sched = bench.Schedule(n - 6, batches=2, batch_size=3)
    rep = bench.run_adaptive_experiment(b, b.solver_config(), sched, seed=1, n_test=2000,
                                        sobol_path=tmp_path / "s.csv",
                                        sampling_log_path=tmp_path / "log.csv")
    assert [r["n_train"] for r in rep.rounds] == [n - 6, n - 3, n]
    assert rep.model.rank == 2 and rep.rounds[-1]["test_error"] <= 1e-4
    assert rep.final["mean"] == pytest.approx(b.truth["mean"], abs=1e-4)
    assert len(rep.sampling_log) == 6 and (tmp_path / "s.csv").exists()
    assert len((tmp_path / "log.csv").read_text().splitlines()) == 7
    assert json.loads(rep.to_json())["final"]["std"] == pytest.approx(b.truth["std"], abs=1e-4)
    rep.write_csv(tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text().startswith("round,n_train,test_error,rank,objective")
    again = bench.run_adaptive_experiment(b, b.solver_config(), sched, seed=1, n_test=2000)
    assert np.array_equal(rep.model.factors, again.model.factors)


def test_train_test_disjoint():
    sp = ParameterSpace.uniform(2)
    a = SampleSet.from_unit(sp, np.array([[0.1, 0.2]]))
    with pytest.raises(RuntimeError):
        bench._check_disjoint(a, a)
    bench._check_disjoint(a, SampleSet.from_unit(sp, np.array([[0.3, 0.2]])))
