"""Moments and Sobol indices read off the CP factors, plus validation helpers.

With an orthonormal basis the mean is the coefficient of the all-zero
multi-index and the variance is the squared norm of the remaining
coefficients.  Both, and the main and total Sobol indices, reduce to products
of small ``R x R`` Gram matrices, so nothing of size ``(p + 1)^d`` is formed.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

from tensorgpc.errors import ZeroVarianceError
from tensorgpc.paramspace import STREAM_MOMENTS

_BATCH = 65536


def _loo(stack):
    # product over the first axis leaving one entry out, without division
    d = stack.shape[0]
    prefix = np.ones_like(stack)
    suffix = np.ones_like(stack)
    for k in range(1, d):
        prefix[k] = prefix[k - 1] * stack[k - 1]
    for k in range(d - 2, -1, -1):
        suffix[k] = suffix[k + 1] * stack[k + 1]
    return prefix * suffix


def _grams(factors):
    # G[k] = U_k^T U_k, shape (d, R, R)
    return np.einsum("kpr,kps->krs", factors, factors)


def mean(model):
    """Expected value of the surrogate."""
    return float(np.prod(model.factors[:, 0, :], axis=0).sum())


def variance(model):
    """Variance of the surrogate, ``<X, X> - mean^2``."""
    G = np.prod(_grams(model.factors), axis=0)
    return float(G.sum() - mean(model) ** 2)


@dataclass
class SobolReport:
    """Main (``main``) and total (``total``) first-order Sobol indices."""

    main: np.ndarray
    total: np.ndarray
    mean: float
    variance: float

    @property
    def std(self):
        return float(np.sqrt(max(self.variance, 0.0)))

    def to_dict(self):
        return {
            "mean": self.mean,
            "variance": self.variance,
            "std": self.std,
            "main": [float(v) for v in self.main],
            "total": [float(v) for v in self.total],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def write_csv(self, path):
        """Rows ``index,S,T`` with one-based parameter indices."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "S", "T"])
            for j, (s, t) in enumerate(zip(self.main, self.total)):
                w.writerow([j + 1, repr(float(s)), repr(float(t))])


def sobol(model):
    """Main and total Sobol indices of every input.

    Raises
    ------
    ZeroVarianceError
        If the surrogate variance is not positive.
    """
    F = model.factors
    mu = mean(model)
    grams = _grams(F)
    var = float(np.prod(grams, axis=0).sum() - mu ** 2)
    if not var > 0:
        raise ZeroVarianceError(f"surrogate variance is {var!r}; Sobol indices undefined")

    # main: Var(E[y | x_j]) = sum_{i >= 1} (sum_r U_j[i, r] prod_{k != j} U_k[0, r])^2
    zero_rows = _loo(F[:, 0, :])
    cond = np.einsum("kir,kr->ki", F[:, 1:, :], zero_rows)
    main = (cond ** 2).sum(axis=1) / var

    # total: 1 - Var(E[y | x_~j]) / var
    others = _loo(grams)
    first = np.einsum("kr,ks->krs", F[:, 0, :], F[:, 0, :])
    rest = (first * others).sum(axis=(1, 2)) - mu ** 2
    total = 1.0 - rest / var
    return SobolReport(main=main, total=total, mean=mu, variance=var)


def mc_moments(model, n, seed):
    """Sample mean and variance of the surrogate over ``n`` random inputs."""
    if n < 2:
        raise ValueError("mc_moments needs n >= 2")
    vals = np.empty(n)
    for start in range(0, n, _BATCH):
        m = min(_BATCH, n - start)
        block = model.space.sample(m, seed, STREAM_MOMENTS, start // _BATCH)
        vals[start:start + m] = model.predict(block.phys)
    return float(vals.mean()), float(vals.var(ddof=1))


def silverman_bandwidth(values):
    values = np.asarray(values, dtype=float)
    return 1.06 * values.std(ddof=1) * len(values) ** (-0.2)


def kde(values, grid):
    """Gaussian kernel density estimate of ``values`` evaluated on ``grid``."""
    values = np.asarray(values, dtype=float).ravel()
    grid = np.asarray(grid, dtype=float)
    if values.size < 2:
        raise ValueError("kde needs at least two values")
    h = silverman_bandwidth(values)
    if not h > 0:
        raise ValueError("kde needs values with nonzero spread")
    flat = grid.ravel()
    out = np.zeros(flat.shape)
    norm = 1.0 / (values.size * h * np.sqrt(2.0 * np.pi))
    step = max(1, 2**22 // max(flat.size, 1))
    for s in range(0, values.size, step):
        z = (flat[:, None] - values[None, s:s + step]) / h
        out += np.exp(-0.5 * z * z).sum(axis=1)
    return (out * norm).reshape(grid.shape)


def moments_dict(model):
    mu = mean(model)
    var = variance(model)
    return {"mean": mu, "variance": var, "std": float(np.sqrt(max(var, 0.0)))}
