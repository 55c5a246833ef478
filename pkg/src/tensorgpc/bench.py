"""Benchmark functions, reference oracles and the adaptive experiment driver."""

import csv
import json
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from tensorgpc import stats
from tensorgpc.basis import BasisBundle
from tensorgpc.cpmodel import CpModel
from tensorgpc.errors import DomainError, ZeroNormError
from tensorgpc.paramspace import (
    STREAM_SOBOL,
    STREAM_TEST,
    ParameterSpace,
    SampleSet,
    Uniform,
    latin_hypercube,
    make_rng,
)
from tensorgpc.sampler import select_next, write_sampling_log
from tensorgpc.solver import SolverConfig, fit, fit_continuation

log = logging.getLogger(__name__)

SYNTHETIC_DIM = 100
_EVAL_BATCH = 8192


@dataclass
class Benchmark:
    """A deterministic test function over a parameter space.

    ``f`` maps an ``(n, d)`` array of physical points to ``n`` outputs.
    ``solver`` holds solver settings known to suit the function and
    ``polish`` says whether a low-penalty refit should follow rank detection.
    """

    name: str
    space: ParameterSpace
    f: Callable
    truth: Optional[dict] = None
    n_test: int = 10**4
    solver: dict = field(default_factory=dict)
    polish: bool = False
    model: Optional[CpModel] = None

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty(X.shape[0])
        for s in range(0, X.shape[0], _EVAL_BATCH):
            out[s:s + _EVAL_BATCH] = self.f(X[s:s + _EVAL_BATCH])
        return out

    def solver_config(self, **overrides):
        """Default solver settings updated with the benchmark's and ``overrides``."""
        return replace(SolverConfig(**self.solver), **overrides)


# -- synthetic high-dimensional function ----------------------------------------


def synthetic_space(d=SYNTHETIC_DIM):
    m = [Uniform(1.0, 2.0)] * d
    m[19] = Uniform(1.0, 3.0)
    return ParameterSpace(tuple(m))


_SYNTH_SPACE = synthetic_space()
_SYNTH_LO = np.array([m.lo for m in _SYNTH_SPACE.marginals])
_SYNTH_HI = np.array([m.hi for m in _SYNTH_SPACE.marginals])


def synthetic_100_batch(X):
    """Vectorized 100-dimensional analytical test function.

    Raises
    ------
    DomainError
        If any point lies outside ``[1, 2]^100`` (``[1, 3]`` for input 20).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    d = SYNTHETIC_DIM
    if X.shape[1] != d:
        raise ValueError(f"expected {d} columns, got {X.shape[1]}")
    if np.any((X < _SYNTH_LO) | (X > _SYNTH_HI)) or np.isnan(X).any():
        raise DomainError("point outside the synthetic benchmark domain")
    k = np.arange(1, d + 1, dtype=float)
    x = lambda j: X[:, j - 1]  # one-based input index
    return (3.0
            - 5.0 / d * (X @ k)
            + 1.0 / d * (X ** 3 @ k)
            + x(1) * x(2) ** 2
            + x(2) * x(4)
            - x(3) * x(5)
            + x(51)
            + x(50) * x(54) ** 2
            + np.log((X ** 2 + X ** 4) @ k / (3.0 * d)))


def synthetic_100(xi):
    """The synthetic function at one point."""
    return float(synthetic_100_batch(np.asarray(xi, dtype=float)[None, :])[0])


def synthetic_100_benchmark():
    # rank detection on 200-400 samples of a 100-dim input: identical
    # starting components (no function noise) keep spurious components from
    # fitting the sampling noise, the scale asymmetry lets them collapse
    return Benchmark(
        name="synthetic_100",
        space=synthetic_space(),
        f=synthetic_100_batch,
        n_test=10**5,
        solver=dict(rank=5, q=0.5, lambda0=1.0, max_iters=300, tol=1e-4,
                    init_noise=0.0, init_scale_noise=2.0),
    )


# -- planted low-rank models ----------------------------------------------------------


def planted_amplitude(d):
    """Spread of the higher-order planted coefficients for dimension ``d``."""
    return min(0.8, 2.4 / d)


def planted_factors(d, rank, p=2, seed=0, amplitude=None):
    """Random CP factors with well-separated component scales.

    Every component has constant coefficient 1 in each mode and higher
    coefficients uniform in ``[-a, a]``; the first mode carries the
    component weights ``3 * (1, -0.7, 0.5, 0.3, ...)``.
    """
    a = planted_amplitude(d) if amplitude is None else float(amplitude)
    rng = np.random.default_rng(seed)
    F = rng.uniform(-a, a, (d, p + 1, rank))
    F[:, 0, :] = 1.0
    weights = 3.0 * np.array([1.0, -0.7, 0.5, 0.3] + [0.2] * max(0, rank - 4))[:rank]
    F[0] *= weights
    return F


def planted_benchmark(d, rank, p=2, seed=0, lo=-1.0, hi=1.0, amplitude=None):
    space = ParameterSpace.uniform(d, lo, hi)
    model = CpModel(planted_factors(d, rank, p, seed, amplitude), space)
    return Benchmark(
        name=f"planted_d{d}_r{rank}",
        space=space,
        f=model.predict,
        truth={"mean": stats.mean(model), "std": float(np.sqrt(stats.variance(model)))},
        n_test=10**4,
        solver=dict(rank=rank + 2, q=0.5, lambda0=1.0, max_iters=1000, tol=1e-6,
                    init_noise=0.2, init_scale_noise=2.0),
        polish=True,
        model=model,
    )


def planted_sample_count(d, rank, p=2, factor=4):
    """``factor`` times the number of CP unknowns ``d (p + 1) rank``."""
    return factor * d * (p + 1) * rank


# -- metrics and oracles ----------------------------------------------------------------


def relative_l2(predictions, truths):
    """``||y - yhat|| / ||y||``."""
    pred = np.asarray(predictions, dtype=float).ravel()
    ref = np.asarray(truths, dtype=float).ravel()
    if pred.shape != ref.shape:
        raise ValueError("predictions and truths must have equal length")
    nrm = np.linalg.norm(ref)
    if nrm == 0:
        raise ZeroNormError("reference vector has zero norm")
    return float(np.linalg.norm(ref - pred) / nrm)


def mc_sobol_oracle(benchmark, n, seed):
    """Pick-freeze Monte Carlo estimates of main and total Sobol indices.

    Main indices use the Saltelli (2010) estimator, total indices the Jansen
    estimator, both from the same ``A``, ``B`` and ``A_B^(j)`` evaluations.
    Outputs are centered first; the main-index estimator is not shift
    invariant and a large mean inflates its variance.
    """
    if n < 1000:
        raise ValueError("mc_sobol_oracle needs n >= 1000")
    space = benchmark.space
    d = space.dim
    rng = make_rng(seed, STREAM_SOBOL)
    uA = _open_unit(rng, n, d)
    uB = _open_unit(rng, n, d)
    A = space.to_phys(uA)
    B = space.to_phys(uB)
    fA = benchmark(A)
    fB = benchmark(B)
    both = np.concatenate([fA, fB])
    shift = both.mean()
    var = np.var(both, ddof=1)
    fA = fA - shift
    fB = fB - shift
    S = np.empty(d)
    T = np.empty(d)
    for j in range(d):
        AB = A.copy()
        AB[:, j] = B[:, j]
        fAB = benchmark(AB) - shift
        S[j] = np.mean(fB * (fAB - fA)) / var
        T[j] = 0.5 * np.mean((fA - fAB) ** 2) / var
    return S, T


def _open_unit(rng, n, d):
    u = rng.random((n, d))
    u[u == 0.0] = np.nextafter(0.0, 1.0)
    return u


def mc_truth(benchmark, n, seed):
    """Monte Carlo mean and standard deviation of the benchmark function."""
    pts = benchmark.space.sample(n, seed, STREAM_TEST, 1)
    y = benchmark(pts.phys)
    return float(y.mean()), float(y.std(ddof=1))


# -- adaptive experiment ------------------------------------------------------------------


@dataclass(frozen=True)
class Schedule:
    n_init: int
    batches: int = 0
    batch_size: int = 1

    @property
    def budget(self):
        return self.n_init + self.batches * self.batch_size


@dataclass
class ExperimentReport:
    rounds: list
    final: dict
    model: CpModel
    samples: SampleSet
    sampling_log: list = field(default_factory=list)

    def to_dict(self):
        return {"rounds": self.rounds, "final": self.final}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def write_json(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    def write_csv(self, path):
        """Per-round ``round,n_train,test_error,rank,objective`` rows."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["round", "n_train", "test_error", "rank", "objective"])
            for i, r in enumerate(self.rounds):
                w.writerow([i, r["n_train"], repr(r["test_error"]), r["rank"], repr(r["objective"])])


def _fit_round(data, space, bases, config, warm, polish):
    if polish:
        model, (_, state) = fit_continuation(data, space, bases, config, warm_start=warm)
    else:
        model, state = fit(data, space, bases, config, warm_start=warm)
    return model, state


def run_adaptive_experiment(benchmark, config, schedule, seed, degree=2, n_test=None,
                            polish=None, M=None, sobol_path=None, sampling_log_path=None):
    """Latin Hypercube start, then alternate sample selection and refits.

    Every refit is warm-started from the previous round's model.  Test
    errors use a held-out Monte Carlo set drawn from its own seed stream.
    """
    space = benchmark.space
    bases = BasisBundle(space, degree)
    config = replace(config, seed=int(seed))
    polish = benchmark.polish if polish is None else bool(polish)
    n_test = benchmark.n_test if n_test is None else int(n_test)

    test = space.sample(n_test, seed, STREAM_TEST)
    y_test = benchmark(test.phys)

    unit = latin_hypercube(schedule.n_init, space.dim, seed)
    data = SampleSet.from_unit(space, unit)
    data = data.with_outputs(benchmark(data.phys))
    _check_disjoint(data, test)

    rounds = []
    sampling_rows = []
    model = None
    for rnd in range(schedule.batches + 1):
        if rnd > 0:
            sel = select_next(data, model, space, schedule.batch_size, M=M, seed=seed,
                              round_index=rnd)
            new = sel.samples.with_outputs(benchmark(sel.samples.phys))
            _check_disjoint(new, test)
            data = data.extend(new)
            sampling_rows.extend(sel.log_rows)
        model, state = _fit_round(data, space, bases, config, model, polish)
        err = relative_l2(model.predict(test.phys), y_test)
        rounds.append({
            "n_train": len(data),
            "test_error": err,
            "rank": model.rank,
            "objective": float(state.objective_trace[-1]) if state.objective_trace else float("nan"),
        })
        log.info("round %d: n=%d rank=%d error=%.3e", rnd, len(data), model.rank, err)

    mom = stats.moments_dict(model)
    final = {"mean": mom["mean"], "std": mom["std"], "sobol_path": None if sobol_path is None else str(sobol_path)}
    if sobol_path is not None:
        stats.sobol(model).write_csv(sobol_path)
    if sampling_log_path is not None:
        write_sampling_log(sampling_log_path, sampling_rows)
    return ExperimentReport(rounds, final, model, data, sampling_rows)


def _check_disjoint(train, test):
    seen = {row.tobytes() for row in test.unit}
    if any(row.tobytes() in seen for row in train.unit):
        raise RuntimeError("training and test sets overlap")
