"""Command-line interface: ``tensorgpc {sample,fit,adapt,predict,stats,bench}``.

Runs are described by one JSON config file; command-line flags override its
fields.  Exit codes: 0 success, 2 configuration or input error, 3 simulator
error, 4 solver failure.
"""

import argparse
import csv
import json
import logging
import math
import os
import shlex
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from tensorgpc import bench, stats
from tensorgpc.basis import BasisBundle
from tensorgpc.cpmodel import CpModel
from tensorgpc.errors import (
    ConfigError,
    SimulatorError,
    SolverError,
    ZeroVarianceError,
)
from tensorgpc.paramspace import (
    ParameterSpace,
    SampleSet,
    latin_hypercube,
    read_samples_csv,
    write_samples_csv,
)
from tensorgpc.sampler import MC_CAP, select_next, write_sampling_log
from tensorgpc.solver import (
    SolverConfig,
    cross_validate_lambda0,
    fit,
    fit_continuation,
    write_fit_log,
)

log = logging.getLogger("tensorgpc")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULATOR = 3
EXIT_SOLVER = 4

_SOLVER_FIELDS = {f.name for f in fields(SolverConfig)}
_SAMPLER_FIELDS = {"M_factor", "batch_size", "budget", "n_init"}
_PATH_FIELDS = {"samples", "model", "fit_log", "sampling_log", "report", "sobol", "kde"}
_TOP_FIELDS = {"space", "degree", "solver", "sampler", "seed", "paths", "polish"}


# -- configuration ----------------------------------------------------------------


@dataclass
class RunConfig:
    space: ParameterSpace
    degree: int = 2
    solver: SolverConfig = field(default_factory=SolverConfig)
    polish: bool = False
    cv: bool = False
    M_factor: int = 100
    batch_size: int = 1
    budget: int = 0
    n_init: int = 0
    seed: int = None
    paths: dict = field(default_factory=dict)

    def path(self, key, required=True):
        p = self.paths.get(key)
        if p is None and required:
            raise ConfigError(f"paths.{key}: no path given (config or command line)")
        return p


def _parse_space(obj, where="space"):
    if isinstance(obj, str):
        if obj == "synthetic_100":
            return bench.synthetic_space()
        raise ConfigError(f"{where}: unknown preset {obj!r}")
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object or a preset name")
    if "marginals" in obj:
        try:
            return ParameterSpace.from_dict(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.marginals: {exc}") from None
    if "uniform" in obj or "gaussian" in obj:
        kind = "uniform" if "uniform" in obj else "gaussian"
        params = obj[kind]
        try:
            d = int(params["d"])
            if kind == "uniform":
                return ParameterSpace.uniform(d, float(params.get("lo", 0.0)), float(params.get("hi", 1.0)))
            return ParameterSpace.gaussian(d, float(params.get("mean", 0.0)), float(params.get("stddev", 1.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.{kind}: {exc}") from None
    raise ConfigError(f"{where}: expected 'marginals', 'uniform' or 'gaussian'")


def load_config(path):
    """Parse and validate a run config; relative paths resolve against its folder."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(obj, base=Path(path).parent)


def config_from_dict(obj, base=Path(".")):
    unknown = set(obj) - _TOP_FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "space" not in obj:
        raise ConfigError("space: required")
    cfg = RunConfig(space=_parse_space(obj["space"]))

    if "degree" in obj:
        cfg.degree = _int(obj["degree"], "degree", lo=0)
    if "seed" in obj:
        cfg.seed = _int(obj["seed"], "seed", lo=0)
    cfg.polish = bool(obj.get("polish", False))

    solver = dict(obj.get("solver", {}))
    bad = set(solver) - _SOLVER_FIELDS
    if bad:
        raise ConfigError(f"solver: unknown keys {', '.join(sorted(bad))}")
    if solver.get("lambda0") == "cv":
        cfg.cv = True
        solver.pop("lambda0")
    try:
        cfg.solver = SolverConfig(**solver)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"solver: {exc}") from None

    sampler = obj.get("sampler", {})
    bad = set(sampler) - _SAMPLER_FIELDS
    if bad:
        raise ConfigError(f"sampler: unknown keys {', '.join(sorted(bad))}")
    for key in _SAMPLER_FIELDS:
        if key in sampler:
            setattr(cfg, key, _int(sampler[key], f"sampler.{key}", lo=0))

    paths = obj.get("paths", {})
    bad = set(paths) - _PATH_FIELDS
    if bad:
        raise ConfigError(f"paths: unknown keys {', '.join(sorted(bad))}")
    cfg.paths = {k: str(base / v) for k, v in paths.items()}
    return cfg


def _int(value, where, lo=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(f"{where}: must be >= {lo}, got {value}")
    return value


def _apply_overrides(cfg, args):
    for key in ("samples", "model", "fit_log", "sampling_log", "report", "sobol", "kde"):
        val = getattr(args, key, None)
        if val is not None:
            cfg.paths[key] = val
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "degree", None) is not None:
        cfg.degree = args.degree
    solver = {}
    for key in ("q", "lambda0", "rank", "max_iters", "tol"):
        val = getattr(args, key, None)
        if val is not None:
            solver[key] = val
    if getattr(args, "mode", None) is not None:
        solver["mode"] = args.mode.replace("-", "_")
    if solver:
        try:
            cfg.solver = replace(cfg.solver, **solver)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"solver: {exc}") from None
    for key in ("batch_size", "budget", "n_init"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "polish", False):
        cfg.polish = True
    return cfg


def _require_seed(cfg):
    if cfg.seed is None:
        raise ConfigError("--seed is required for this command")
    cfg.solver = replace(cfg.solver, seed=int(cfg.seed))


# -- file helpers -----------------------------------------------------------------------


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_samples(path, samples):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        write_samples_csv(tmp, samples)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_samples(path, space=None):
    try:
        data = read_samples_csv(path)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if space is not None and data.dim != space.dim:
        raise ConfigError(f"{path}: {data.dim} parameters, config space has {space.dim}")
    return data


def _require_labels(data, path):
    missing = data.missing_labels()
    if missing:
        lines = ", ".join(str(i + 2) for i in missing[:20])
        more = "" if len(missing) <= 20 else f" (+{len(missing) - 20} more)"
        raise ConfigError(f"{path}: rows without y at lines {lines}{more}")


def _load_model(path):
    try:
        return CpModel.load(path)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: invalid model file ({exc})") from None


# -- simulator protocol -------------------------------------------------------------------


def run_simulator(command, phys):
    """Evaluate the external simulator on the rows of ``phys``.

    The command receives one line of space-separated coordinates per point on
    stdin and must print one real per line, in the same order.
    """
    phys = np.atleast_2d(phys)
    payload = "".join(" ".join(repr(float(v)) for v in row) + "\n" for row in phys)
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    try:
        proc = subprocess.run(argv, input=payload, capture_output=True, text=True)
    except OSError as exc:
        raise SimulatorError(f"cannot start simulator {argv[0]!r}: {exc}") from None
    if proc.returncode != 0:
        err = proc.stderr.strip().splitlines()
        tail = f": {err[-1]}" if err else ""
        raise SimulatorError(f"simulator exited with status {proc.returncode}{tail}; "
                             f"batch starts at point {_fmt_point(phys[0])}")
    lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
    if len(lines) != phys.shape[0]:
        i = min(len(lines), phys.shape[0] - 1)
        raise SimulatorError(f"simulator returned {len(lines)} values for {phys.shape[0]} points; "
                             f"first unmatched point {_fmt_point(phys[i])}")
    out = np.empty(len(lines))
    for i, ln in enumerate(lines):
        try:
            out[i] = float(ln)
        except ValueError:
            raise SimulatorError(f"unparsable simulator output {ln.strip()!r} "
                                 f"for point {_fmt_point(phys[i])}") from None
        if not math.isfinite(out[i]):
            raise SimulatorError(f"non-finite simulator output for point {_fmt_point(phys[i])}")
    return out


def _fmt_point(x):
    return "[" + ", ".join(f"{v:.6g}" for v in x) + "]"


# -- fitting ---------------------------------------------------------------------------------


def _fit(cfg, data, warm=None):
    bases = BasisBundle(cfg.space, cfg.degree)
    solver = cfg.solver
    if cfg.cv:
        lam0, scores = cross_validate_lambda0(data, cfg.space, bases, solver, warm_start=warm)
        log.info("cross-validated lambda0 = %g", lam0)
        solver = replace(solver, lambda0=lam0)
    if cfg.polish:
        model, (_, state) = fit_continuation(data, cfg.space, bases, solver, warm_start=warm)
    else:
        model, state = fit(data, cfg.space, bases, solver, warm_start=warm)
    return model, state


def _save_model(cfg, model, state):
    atomic_write_text(cfg.path("model"), model.to_json())
    if cfg.paths.get("fit_log"):
        write_fit_log(cfg.paths["fit_log"], state)


# -- commands ----------------------------------------------------------------------------------


def cmd_sample(cfg):
    """Write ``n_init`` unlabeled Latin Hypercube rows."""
    if cfg.seed is None:
        cfg.seed = 0
    if cfg.n_init < 1:
        raise ConfigError("sampler.n_init: must be >= 1 (or pass --n)")
    unit = latin_hypercube(cfg.n_init, cfg.space.dim, cfg.seed)
    _atomic_samples(cfg.path("samples"), SampleSet.from_unit(cfg.space, unit))
    return EXIT_OK


def cmd_fit(cfg, warm_path=None):
    _require_seed(cfg)
    path = cfg.path("samples")
    data = _read_samples(path, cfg.space)
    _require_labels(data, path)
    warm = _load_model(warm_path) if warm_path else None
    model, state = _fit(cfg, data, warm)
    _save_model(cfg, model, state)
    log.info("fitted rank %d in %d iterations", model.rank, state.iter)
    return EXIT_OK


def cmd_adapt(cfg, simulator, rounds=None, target_error=None):
    """Adaptive loop against an external simulator.

    The sample file is only ever replaced by a complete, longer version of
    itself, so a failing simulator never loses labeled rows.  With
    ``target_error`` the loop stops once the current model predicts a freshly
    simulated batch to within that relative error.
    """
    _require_seed(cfg)
    if not simulator:
        raise ConfigError("--simulator is required")
    samples_path = cfg.path("samples")
    if os.path.exists(samples_path):
        data = _read_samples(samples_path, cfg.space)
    else:
        if cfg.n_init < 1:
            raise ConfigError(f"{samples_path} does not exist and sampler.n_init is not set")
        unit = latin_hypercube(cfg.n_init, cfg.space.dim, cfg.seed)
        data = SampleSet.from_unit(cfg.space, unit)

    missing = data.missing_labels()
    if missing:
        y = data.outputs.copy() if data.outputs is not None else np.full(len(data), np.nan)
        y[missing] = run_simulator(simulator, data.phys[missing])
        data = data.with_outputs(y)
        _atomic_samples(samples_path, data)

    budget = cfg.budget if cfg.budget > 0 else len(data)
    if len(data) >= budget:
        print(f"budget of {budget} samples already spent ({len(data)} labeled); nothing to do")
        if not os.path.exists(cfg.path("model")):
            model, state = _fit(cfg, data)
            _save_model(cfg, model, state)
        return EXIT_OK

    K = max(1, cfg.batch_size)
    model, state = _fit(cfg, data)
    _save_model(cfg, model, state)
    done = 0
    while len(data) < budget and (rounds is None or done < rounds):
        k = min(K, budget - len(data))
        M = cfg.M_factor * len(data)
        if M > MC_CAP:
            log.warning("Monte Carlo count %d capped at %d", M, MC_CAP)
            M = MC_CAP
        rnd = _last_round(cfg.paths.get("sampling_log")) + 1
        sel = select_next(data, model, cfg.space, k, M=M, seed=cfg.seed, round_index=rnd,
                          counter=len(data))
        y_new = run_simulator(simulator, sel.samples.phys)
        held_out = bench.relative_l2(model.predict(sel.samples.phys), y_new) \
            if np.linalg.norm(y_new) > 0 else float("nan")
        data = data.extend(sel.samples.with_outputs(y_new))
        _atomic_samples(samples_path, data)
        if cfg.paths.get("sampling_log"):
            write_sampling_log(cfg.paths["sampling_log"], sel.log_rows, append=True)
        model, state = _fit(cfg, data, warm=model)
        _save_model(cfg, model, state)
        done += 1
        log.info("round %d: n=%d rank=%d batch error=%.3e", done, len(data), model.rank, held_out)
        if target_error is not None and held_out <= target_error:
            print(f"target error reached: {held_out:.3e} <= {target_error:g}")
            break
    return EXIT_OK


def _last_round(path):
    if not path or not os.path.exists(path):
        return 0
    with open(path, newline="") as fh:
        rounds = [int(row["round"]) for row in csv.DictReader(fh)]
    return max(rounds, default=0)


def _read_points(path, dim):
    # samples CSV (x columns) or a plain whitespace/comma matrix of coordinates
    with open(path) as fh:
        first = fh.readline()
    if first.startswith("u_1"):
        return read_samples_csv(path).phys
    X = np.loadtxt(path, delimiter="," if "," in first else None, ndmin=2)
    if X.shape[1] != dim:
        raise ConfigError(f"{path}: {X.shape[1]} columns, model has {dim} parameters")
    return X


def cmd_predict(model_path, input_path, out_path=None):
    model = _load_model(model_path)
    try:
        X = _read_points(input_path, model.dim)
    except OSError as exc:
        raise ConfigError(f"{input_path}: {exc.strerror}") from None
    y = model.predict(X)
    text = "y_hat\n" + "".join(f"{v!r}\n" for v in map(float, y))
    if out_path:
        atomic_write_text(out_path, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_stats(model_path, json_path=None, sobol_path=None, kde_path=None, kde_n=10**5,
              kde_points=200, seed=0):
    """Moments, Sobol indices and optionally a density table of the surrogate."""
    model = _load_model(model_path)
    out = stats.moments_dict(model)
    try:
        rep = stats.sobol(model)
        out["main"] = [float(v) for v in rep.main]
        out["total"] = [float(v) for v in rep.total]
        if sobol_path:
            rep.write_csv(sobol_path)
    except ZeroVarianceError as exc:
        log.warning("%s; Sobol indices skipped", exc)
        out["main"] = out["total"] = None
    if kde_path:
        _write_kde(model, kde_path, kde_n, kde_points, seed)
    text = json.dumps(out, indent=1, sort_keys=True) + "\n"
    if json_path:
        atomic_write_text(json_path, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _write_kde(model, path, n, points, seed):
    draws = model.space.sample(n, seed)
    vals = model.predict(draws.phys)
    sd = vals.std(ddof=1)
    if not sd > 0:
        log.warning("surrogate is constant; density table skipped")
        return
    grid = np.linspace(vals.mean() - 5 * sd, vals.mean() + 5 * sd, points)
    dens = stats.kde(vals, grid)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y", "density"])
        for g, p in zip(grid, dens):
            w.writerow([repr(float(g)), repr(float(p))])


def cmd_bench(name, seed, out_dir, n_init=200, batches=9, batch_size=20, n_test=None,
              d=3, rank=2, sobol_oracle_n=0):
    """Run a built-in benchmark experiment and write its report files."""
    if name == "synthetic_100":
        b = bench.synthetic_100_benchmark()
        schedule = bench.Schedule(n_init, batches, batch_size)
    elif name == "planted":
        b = bench.planted_benchmark(d, rank, seed=seed)
        n = n_init if n_init else bench.planted_sample_count(d, rank)
        schedule = bench.Schedule(n, batches, batch_size)
    else:
        raise ConfigError(f"unknown benchmark {name!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = bench.run_adaptive_experiment(
        b, b.solver_config(), schedule, seed, n_test=n_test,
        sobol_path=str(out / "sobol.csv"), sampling_log_path=str(out / "sampling_log.csv"))
    rep.final["sobol_path"] = "sobol.csv"
    atomic_write_text(out / "report.json", rep.to_json())
    rep.write_csv(out / "rounds.csv")
    atomic_write_text(out / "model.json", rep.model.to_json())
    _atomic_samples(out / "samples.csv", rep.samples)
    if sobol_oracle_n:
        S, T = bench.mc_sobol_oracle(b, sobol_oracle_n, seed)
        with open(out / "sobol_mc.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "S", "T"])
            for j in range(len(S)):
                w.writerow([j + 1, repr(float(S[j])), repr(float(T[j]))])
    last = rep.rounds[-1]
    print(f"{name}: n_train={last['n_train']} rank={last['rank']} "
          f"test_error={last['test_error']:.4%} mean={rep.final['mean']:.4f} std={rep.final['std']:.4f}")
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------------------


def _config_args(p, seed_required=False):
    p.add_argument("--config", "-c", required=True, help="run config JSON")
    p.add_argument("--seed", type=int, required=seed_required)
    p.add_argument("--degree", type=int)


def _solver_args(p):
    p.add_argument("--q", type=float)
    p.add_argument("--lambda0", type=float)
    p.add_argument("--rank", type=int, help="initial rank")
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--mode", choices=["group-sparse", "fixed-rank"])
    p.add_argument("--polish", action="store_true",
                   help="refit at a tiny penalty after rank detection")
    p.add_argument("--fit-log", dest="fit_log")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0)
    parser = argparse.ArgumentParser(prog="tensorgpc", description=__doc__.splitlines()[0],
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    p = add("sample", "write an unlabeled Latin Hypercube design")
    _config_args(p)
    p.add_argument("--n", dest="n_init", type=int)
    p.add_argument("--out", dest="samples")

    p = add("fit", "fit a model to labeled samples")
    _config_args(p, seed_required=True)
    _solver_args(p)
    p.add_argument("--samples")
    p.add_argument("--model", help="output model file")
    p.add_argument("--warm", help="model file to warm-start from")

    p = add("adapt", "adaptive sampling loop with an external simulator")
    _config_args(p, seed_required=True)
    _solver_args(p)
    p.add_argument("--simulator", required=True, help="simulator command line")
    p.add_argument("--samples")
    p.add_argument("--model")
    p.add_argument("--sampling-log", dest="sampling_log")
    p.add_argument("--budget", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--n-init", dest="n_init", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--target-error", dest="target_error", type=float)

    p = add("predict", "evaluate a model at given points")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="samples CSV or coordinate matrix")
    p.add_argument("--out")

    p = add("stats", "moments and Sobol indices of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--json")
    p.add_argument("--sobol")
    p.add_argument("--kde")
    p.add_argument("--kde-n", dest="kde_n", type=int, default=10**5)
    p.add_argument("--kde-points", dest="kde_points", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = add("bench", "run a built-in benchmark experiment")
    p.add_argument("name", choices=["synthetic_100", "planted"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--n-init", dest="n_init", type=int)
    p.add_argument("--batches", type=int, default=None)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=20)
    p.add_argument("--n-test", dest="n_test", type=int)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--sobol-oracle-n", dest="sobol_oracle_n", type=int, default=0)
    return parser


def _dispatch(args):
    if args.command == "predict":
        return cmd_predict(args.model, args.input, args.out)
    if args.command == "stats":
        return cmd_stats(args.model, args.json, args.sobol, args.kde, args.kde_n,
                         args.kde_points, args.seed)
    if args.command == "bench":
        if args.name == "synthetic_100":
            n_init = 200 if args.n_init is None else args.n_init
            batches = 9 if args.batches is None else args.batches
        else:
            n_init = args.n_init or 0
            batches = 0 if args.batches is None else args.batches
        return cmd_bench(args.name, args.seed, args.out_dir, n_init, batches, args.batch_size,
                         args.n_test, args.d, args.rank, args.sobol_oracle_n)

    cfg = _apply_overrides(load_config(args.config), args)
    if args.command == "sample":
        return cmd_sample(cfg)
    if args.command == "fit":
        return cmd_fit(cfg, args.warm)
    return cmd_adapt(cfg, args.simulator, args.rounds, args.target_error)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulatorError as exc:
        print(f"simulator error: {exc}", file=sys.stderr)
        return EXIT_SIMULATOR
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
