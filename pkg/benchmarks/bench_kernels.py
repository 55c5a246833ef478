"""Time the numba kernels against the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--quick]

Each kernel runs on identical inputs under both backends; results are
checked for agreement before timings are printed.
"""

import argparse
import os
import time

import numpy as np

from tensorgpc import _accel


def _cases(quick):
    rng = np.random.default_rng(0)
    n, d, P, R = (2000, 100, 3, 5) if quick else (20000, 100, 3, 5)
    phi = rng.standard_normal((n, d, P))
    factors = rng.standard_normal((d, P, R)) * 0.3
    factors[:, 0, :] = 1.0
    rows = np.einsum("ndp,dpr->ndr", phi, factors)
    m, nc = (20000, 200) if quick else (200000, 380)
    points = rng.random((m, d))
    centers = rng.random((nc, d))
    return {
        "mode_products": (phi, factors),
        "cp_evaluate": (phi, factors),
        "loo_products": (rows,),
        "suffix_products": (rows,),
        "nearest_center": (points, centers),
    }


def _best_time(fn, args, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--quick", action="store_true", help="small inputs")
    args = parser.parse_args(argv)

    if not _accel.HAVE_NUMBA:
        print("numba is not importable; nothing to compare")
        return 1
    if os.environ.get(_accel.ENV_FLAG):
        print(f"note: {_accel.ENV_FLAG} is set; this script calls both backends directly")

    print(f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, inputs in _cases(args.quick).items():
        inputs = tuple(np.ascontiguousarray(a) for a in inputs)
        nb = _accel.NUMBA_KERNELS[name]
        nb(*inputs)  # compile outside the timed region
        t_np, r_np = _best_time(_accel.NUMPY_KERNELS[name], inputs, args.repeat)
        t_nb, r_nb = _best_time(nb, inputs, args.repeat)
        if r_np.dtype.kind == "i":
            ok = np.array_equal(r_np, r_nb)
        else:
            ok = np.allclose(r_np, r_nb, rtol=1e-10, atol=1e-12)
        flag = "" if ok else "  MISMATCH"
        print(f"{name:<18}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>9.1f}x{flag}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
