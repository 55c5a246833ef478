"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``TENSORGPC_DISABLE_NUMBA`` is unset (or set to ``0``).  Both paths
take and return the same arrays; ``benchmarks/bench_kernels.py`` times them
against each other.

Array conventions
-----------------
phi      : (N, d, P) univariate basis values, P = p + 1
factors  : (d, P, R) CP factor matrices stacked along the first axis
rows     : (N, d, R) per-mode row products ``phi[n, k] @ factors[k]``
"""

import os
import warnings

import numpy as np

# numba probes for TBB on first parallel launch and warns when the installed
# version is too old; it then falls back to another threading layer
warnings.filterwarnings("ignore", message="The TBB threading layer")

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

ENV_FLAG = "TENSORGPC_DISABLE_NUMBA"

_CHUNK = 8192


def _numba_requested():
    flag = os.environ.get(ENV_FLAG, "").strip().lower()
    return flag in ("", "0", "false", "no")


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _np_mode_products(phi, factors):
    return np.einsum("ndp,dpr->ndr", phi, factors, optimize=True)


def _np_cp_evaluate(phi, factors):
    rows = _np_mode_products(phi, factors)
    return rows.prod(axis=1).sum(axis=1)


def _np_loo_products(rows):
    # product over all modes except k, via prefix/suffix (no division)
    n, d, r = rows.shape
    prefix = np.ones((n, d, r))
    suffix = np.ones((n, d, r))
    if d > 1:
        prefix[:, 1:] = np.cumprod(rows[:, :-1], axis=1)
        suffix[:, :-1] = np.cumprod(rows[:, :0:-1], axis=1)[:, ::-1]
    return prefix * suffix


def _np_suffix_products(rows):
    # out[:, k] = prod_{j > k} rows[:, j]
    n, d, r = rows.shape
    out = np.ones((n, d, r))
    if d > 1:
        out[:, :-1] = np.cumprod(rows[:, :0:-1], axis=1)[:, ::-1]
    return out


def _expanded_distances(block, centers, c2):
    # |x - c|^2 - |x|^2 = |c|^2 - 2 x.c, one BLAS call per chunk; the
    # rounding error is bounded by the returned per-row slack
    dist = c2[None, :] - 2.0 * (block @ centers.T)
    x2 = np.einsum("ij,ij->i", block, block)
    slack = 1e-11 * (x2 + c2.max())
    return dist, slack


def _np_refine(block, centers, dist, slack):
    # exact distances for every center within the slack of the minimum
    best = dist.min(axis=1)
    near = dist <= (best + slack)[:, None]
    out = np.argmax(near, axis=1)
    multi = np.flatnonzero(near.sum(axis=1) > 1)
    for i in multi:
        cand = np.flatnonzero(near[i])
        diff = centers[cand] - block[i]
        exact = np.einsum("ij,ij->i", diff, diff)
        out[i] = cand[np.argmin(exact)]
    return out


def _np_nearest_center(points, centers):
    m = points.shape[0]
    out = np.empty(m, dtype=np.int64)
    c2 = np.einsum("ij,ij->i", centers, centers)
    for start in range(0, m, _CHUNK):
        block = points[start:start + _CHUNK]
        dist, slack = _expanded_distances(block, centers, c2)
        out[start:start + _CHUNK] = _np_refine(block, centers, dist, slack)
    return out


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_mode_products(phi, factors):
        n, d, p = phi.shape
        r = factors.shape[2]
        out = np.zeros((n, d, r))
        for i in range(n):
            for k in range(d):
                for a in range(p):
                    b = phi[i, k, a]
                    for s in range(r):
                        out[i, k, s] += b * factors[k, a, s]
        return out

    @njit(cache=True)
    def _nb_cp_evaluate(phi, factors):
        n, d, p = phi.shape
        r = factors.shape[2]
        out = np.zeros(n)
        prod = np.empty(r)
        for i in range(n):
            for s in range(r):
                prod[s] = 1.0
            for k in range(d):
                for s in range(r):
                    acc = 0.0
                    for a in range(p):
                        acc += phi[i, k, a] * factors[k, a, s]
                    prod[s] *= acc
            tot = 0.0
            for s in range(r):
                tot += prod[s]
            out[i] = tot
        return out

    @njit(cache=True)
    def _nb_loo_products(rows):
        n, d, r = rows.shape
        out = np.empty((n, d, r))
        for i in range(n):
            for s in range(r):
                acc = 1.0
                for k in range(d):
                    out[i, k, s] = acc
                    acc *= rows[i, k, s]
                acc = 1.0
                for k in range(d - 1, -1, -1):
                    out[i, k, s] *= acc
                    acc *= rows[i, k, s]
        return out

    @njit(cache=True)
    def _nb_suffix_products(rows):
        n, d, r = rows.shape
        out = np.empty((n, d, r))
        for i in range(n):
            for s in range(r):
                acc = 1.0
                for k in range(d - 1, -1, -1):
                    out[i, k, s] = acc
                    acc *= rows[i, k, s]
        return out

    @njit(cache=True, parallel=True)
    def _nb_refine(block, centers, dist, slack):
        m, nc = dist.shape
        d = block.shape[1]
        out = np.empty(m, dtype=np.int64)
        for i in numba.prange(m):
            lo = np.inf
            for c in range(nc):
                if dist[i, c] < lo:
                    lo = dist[i, c]
            thr = lo + slack[i]
            best = np.inf
            arg = 0
            for c in range(nc):
                if dist[i, c] <= thr:
                    acc = 0.0
                    for j in range(d):
                        diff = centers[c, j] - block[i, j]
                        acc += diff * diff
                    if acc < best:
                        best = acc
                        arg = c
            out[i] = arg
        return out

    def _nb_nearest_center(points, centers):
        # BLAS for the bulk distances, compiled loop for the exact refinement
        m = points.shape[0]
        out = np.empty(m, dtype=np.int64)
        c2 = np.einsum("ij,ij->i", centers, centers)
        for start in range(0, m, _CHUNK):
            block = points[start:start + _CHUNK]
            dist, slack = _expanded_distances(block, centers, c2)
            out[start:start + _CHUNK] = _nb_refine(block, centers, dist, slack)
        return out


NUMPY_KERNELS = {
    "mode_products": _np_mode_products,
    "cp_evaluate": _np_cp_evaluate,
    "loo_products": _np_loo_products,
    "suffix_products": _np_suffix_products,
    "nearest_center": _np_nearest_center,
}

if HAVE_NUMBA:
    NUMBA_KERNELS = {
        "mode_products": _nb_mode_products,
        "cp_evaluate": _nb_cp_evaluate,
        "loo_products": _nb_loo_products,
        "suffix_products": _nb_suffix_products,
        "nearest_center": _nb_nearest_center,
    }
else:  # pragma: no cover
    NUMBA_KERNELS = dict(NUMPY_KERNELS)


def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if HAVE_NUMBA and _numba_requested() else "numpy"


def _kernels():
    return NUMBA_KERNELS if backend() == "numba" else NUMPY_KERNELS


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def mode_products(phi, factors):
    """Row products ``rows[n, k, r] = phi[n, k, :] @ factors[k, :, r]``."""
    return _kernels()["mode_products"](_f64(phi), _f64(factors))


def cp_evaluate(phi, factors):
    """Surrogate values ``sum_r prod_k rows[n, k, r]`` for each sample."""
    return _kernels()["cp_evaluate"](_f64(phi), _f64(factors))


def loo_products(rows):
    """Leave-one-mode-out products ``prod_{j != k} rows[n, j, r]``."""
    return _kernels()["loo_products"](_f64(rows))


def suffix_products(rows):
    """Trailing products ``prod_{j > k} rows[n, j, r]`` (ones for the last mode)."""
    return _kernels()["suffix_products"](_f64(rows))


def nearest_center(points, centers):
    """Index of the closest center for every point (Euclidean distance).

    Ties go to the lowest center index.
    """
    return _kernels()["nearest_center"](_f64(points), _f64(centers))
