"""Random parameter spaces, seeded designs and unit-cube transforms."""

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.special import ndtr, ndtri

from tensorgpc.errors import DomainError

# Stream identifiers for the seed-splitting scheme.  New consumers get new
# ids; existing ids never change so earlier draws are not perturbed.
STREAM_LHS = 1
STREAM_MC = 2
STREAM_INIT = 3
STREAM_VORONOI = 4
STREAM_TEST = 5
STREAM_CV = 6
STREAM_SOBOL = 7
STREAM_MOMENTS = 8


def make_rng(seed, stream, *counters):
    """Independent generator for ``(seed, stream, *counters)``.

    Uses ``SeedSequence`` spawn keys so that every (stream, counter) tuple
    maps to its own statistically independent Philox stream.
    """
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1),
                                spawn_key=(int(stream),) + tuple(int(c) for c in counters))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ValueError(f"Uniform requires lo < hi, got ({self.lo}, {self.hi})")

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def scale(self):
        return 0.5 * (self.hi - self.lo)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        return self.lo + (self.hi - self.lo) * u

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    @property
    def std(self):
        return (self.hi - self.lo) / math.sqrt(12.0)

    def to_dict(self):
        return {"kind": "uniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class Gaussian:
    mean: float
    stddev: float

    def __post_init__(self):
        if not (self.stddev > 0):
            raise ValueError(f"Gaussian requires stddev > 0, got {self.stddev}")

    @property
    def center(self):
        return self.mean

    @property
    def scale(self):
        return self.stddev

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0.0) | (u >= 1.0)):
            raise DomainError("Gaussian quantile is infinite at u in {0, 1}")
        return self.mean + self.stddev * ndtri(u)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return ndtr((x - self.mean) / self.stddev)

    @property
    def std(self):
        return self.stddev

    def to_dict(self):
        return {"kind": "gaussian", "mean": self.mean, "stddev": self.stddev}


Marginal = Union[Uniform, Gaussian]


def marginal_from_dict(obj):
    kind = str(obj.get("kind", "")).lower()
    if kind == "uniform":
        return Uniform(float(obj["lo"]), float(obj["hi"]))
    if kind == "gaussian":
        return Gaussian(float(obj["mean"]), float(obj["stddev"]))
    raise ValueError(f"unknown marginal kind {obj.get('kind')!r}")


@dataclass(frozen=True)
class ParameterSpace:
    """Ordered independent marginals; the sample dimension is ``len(marginals)``."""

    marginals: tuple

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if len(self.marginals) < 1:
            raise ValueError("ParameterSpace needs at least one marginal")

    @classmethod
    def uniform(cls, d, lo=0.0, hi=1.0):
        return cls(tuple(Uniform(lo, hi) for _ in range(d)))

    @classmethod
    def gaussian(cls, d, mean=0.0, stddev=1.0):
        return cls(tuple(Gaussian(mean, stddev) for _ in range(d)))

    @property
    def dim(self):
        return len(self.marginals)

    def to_phys(self, unit):
        """Map unit-cube rows to physical rows (column-wise quantiles)."""
        unit = np.atleast_2d(np.asarray(unit, dtype=float))
        if unit.shape[1] != self.dim:
            raise ValueError(f"expected {self.dim} columns, got {unit.shape[1]}")
        out = np.empty_like(unit)
        for k, m in enumerate(self.marginals):
            out[:, k] = m.quantile(unit[:, k])
        return out

    def to_unit(self, phys):
        phys = np.atleast_2d(np.asarray(phys, dtype=float))
        out = np.empty_like(phys)
        for k, m in enumerate(self.marginals):
            out[:, k] = m.cdf(phys[:, k])
        return out

    def sample(self, n, seed, stream=STREAM_MC, *counters):
        """``n`` i.i.d. draws from the joint distribution, as a SampleSet."""
        unit = _open_uniform(make_rng(seed, stream, *counters), n, self.dim)
        return SampleSet(unit, self.to_phys(unit))

    def to_dict(self):
        return {"marginals": [m.to_dict() for m in self.marginals]}

    @classmethod
    def from_dict(cls, obj):
        return cls(tuple(marginal_from_dict(m) for m in obj["marginals"]))


def _open_uniform(rng, n, d):
    # draws in (0, 1): Gaussian quantiles stay finite
    u = rng.random((n, d))
    while True:
        bad = u == 0.0
        if not bad.any():
            return u
        u[bad] = rng.random(int(bad.sum()))


def latin_hypercube(n, d, seed):
    """Jittered Latin Hypercube design in ``[0, 1)^d``.

    Column ``k`` places exactly one point in each stratum ``[i/n, (i+1)/n)``,
    at a uniform random offset inside the stratum.
    """
    if n < 1 or d < 1:
        raise ValueError("latin_hypercube needs n >= 1 and d >= 1")
    rng = make_rng(seed, STREAM_LHS)
    perms = np.argsort(rng.random((d, n)), axis=1).T
    jitter = rng.random((n, d))
    u = (perms + jitter) / n
    # (i + jitter) / n may round up into the next stratum for jitter near 1
    while True:
        over = np.floor(u * n) > perms
        if not over.any():
            break
        u[over] = np.nextafter(u[over], 0.0)
    # keep strictly positive so Gaussian quantiles stay finite
    zero = u == 0.0
    if zero.any():
        u[zero] = np.nextafter(0.0, 1.0)
    return u


def mc_uniform(m, d, seed, counter=0):
    """``m`` i.i.d. uniform points in ``[0, 1)^d``."""
    if m < 1:
        raise ValueError("mc_uniform needs m >= 1")
    return _open_uniform(make_rng(seed, STREAM_MC, counter), m, d)


def inverse_transform(space, u):
    """Physical point(s) whose marginal CDF values are ``u``."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0.0) | (u > 1.0)):
        raise DomainError("unit coordinates must lie in [0, 1]")
    if u.ndim == 1:
        return space.to_phys(u[None, :])[0]
    return space.to_phys(u)


@dataclass
class SampleSet:
    """Design points in unit and physical coordinates, with optional outputs."""

    unit: np.ndarray
    phys: np.ndarray
    outputs: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        self.unit = np.atleast_2d(np.asarray(self.unit, dtype=float))
        self.phys = np.atleast_2d(np.asarray(self.phys, dtype=float))
        if self.unit.shape != self.phys.shape:
            raise ValueError("unit and phys coordinates must have the same shape")
        if self.outputs is not None:
            self.outputs = np.asarray(self.outputs, dtype=float).reshape(-1)
            if self.outputs.shape[0] != self.unit.shape[0]:
                raise ValueError("outputs length must match the number of points")

    def __len__(self):
        return self.unit.shape[0]

    @property
    def dim(self):
        return self.unit.shape[1]

    @property
    def labeled(self):
        return self.outputs is not None and not np.isnan(self.outputs).any()

    def missing_labels(self):
        """Zero-based row indices without an output value."""
        if self.outputs is None:
            return list(range(len(self)))
        return [int(i) for i in np.flatnonzero(np.isnan(self.outputs))]

    @classmethod
    def from_unit(cls, space, unit, outputs=None):
        return cls(unit, space.to_phys(unit), outputs)

    def with_outputs(self, outputs):
        return SampleSet(self.unit.copy(), self.phys.copy(), outputs)

    def extend(self, other):
        if self.outputs is None and other.outputs is None:
            outs = None
        else:
            mine = self.outputs if self.outputs is not None else np.full(len(self), np.nan)
            theirs = other.outputs if other.outputs is not None else np.full(len(other), np.nan)
            outs = np.concatenate([mine, theirs])
        return SampleSet(np.vstack([self.unit, other.unit]),
                         np.vstack([self.phys, other.phys]), outs)

    def subset(self, idx):
        idx = np.asarray(idx)
        outs = None if self.outputs is None else self.outputs[idx]
        return SampleSet(self.unit[idx], self.phys[idx], outs)


def sample_header(d):
    return ([f"u_{k + 1}" for k in range(d)] + [f"x_{k + 1}" for k in range(d)] + ["y"])


def write_samples_csv(path, samples):
    d = samples.dim
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(sample_header(d))
        for i in range(len(samples)):
            y = ""
            if samples.outputs is not None and not np.isnan(samples.outputs[i]):
                y = repr(float(samples.outputs[i]))
            w.writerow([repr(float(v)) for v in samples.unit[i]]
                       + [repr(float(v)) for v in samples.phys[i]] + [y])


def read_samples_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty sample file")
    header = rows[0]
    if (len(header) - 1) % 2 != 0 or header[-1] != "y":
        raise ValueError(f"{path}: header must be u_1..u_d,x_1..x_d,y")
    d = (len(header) - 1) // 2
    if header != sample_header(d):
        raise ValueError(f"{path}: header must be u_1..u_d,x_1..x_d,y")
    body = rows[1:]
    unit = np.empty((len(body), d))
    phys = np.empty((len(body), d))
    outs = np.full(len(body), np.nan)
    for i, row in enumerate(body):
        if len(row) != 2 * d + 1:
            raise ValueError(f"{path}: line {i + 2} has {len(row)} fields, expected {2 * d + 1}")
        unit[i] = [float(v) for v in row[:d]]
        phys[i] = [float(v) for v in row[d:2 * d]]
        if row[-1].strip():
            outs[i] = float(row[-1])
    return SampleSet(unit, phys, outs)
