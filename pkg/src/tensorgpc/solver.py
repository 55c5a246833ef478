"""Block coordinate descent for group-sparse CP tensor regression.

The fitted objective is

    f(U, eta) = 1/2 sum_n (y_n - <X(U), B(x_n)>)^2
                + lam * (1/2 sum_r v_r^2 / eta_r + 1/2 ||eta||_{q / (2 - q)})

with ``v_r`` the joint norm of component ``r`` across all factor matrices.
Minimizing over ``eta`` recovers ``lam * ||v||_q``, which pushes whole
components to zero; they are pruned after convergence.  Each factor block is
a ridge problem with per-component weights ``1 / eta_r`` and is solved
exactly; the ``eta`` block has a closed form.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import List

import numpy as np
import scipy.linalg

from tensorgpc import _accel
from tensorgpc.cpmodel import CpModel, group_norms, prune_mask
from tensorgpc.errors import SolverError
from tensorgpc.paramspace import STREAM_CV, STREAM_INIT, make_rng

log = logging.getLogger(__name__)

GROUP_SPARSE = "group_sparse"
FIXED_RANK = "fixed_rank"
LAMBDA0_GRID = tuple(float(v) for v in np.logspace(-4, 1, 7))


@dataclass
class SolverConfig:
    """Solver settings.

    ``eps_rel`` sets the eta floor ``eps = eps_rel * (1 + max_r v_r)``.
    ``init_noise`` perturbs the not-yet-updated factors of a cold start so
    that the R initial components are not identical; its effect on the
    component products is kept O(init_noise) independent of the dimension.
    ``extrapolate`` adds a line-search step along the last sweep's change
    after each sweep; the step is kept only if it lowers the objective.
    """

    q: float = 0.5
    lambda0: float = 1e-2
    rank: int = 5
    eps_rel: float = 1e-12
    max_iters: int = 100
    tol: float = 1e-4
    prune_tau: float = 1e-4
    mode: str = GROUP_SPARSE
    init_noise: float = 0.2
    init_scale_noise: float = 0.5
    seed: int = 0
    track_blocks: bool = False
    extrapolate: bool = False

    def __post_init__(self):
        if not (0.0 < self.q <= 1.0):
            raise ValueError(f"q must be in (0, 1], got {self.q}")
        if not self.lambda0 > 0:
            raise ValueError(f"lambda0 must be > 0, got {self.lambda0}")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if not (self.eps_rel > 0 and self.tol > 0):
            raise ValueError("eps_rel and tol must be > 0")
        if self.mode not in (GROUP_SPARSE, FIXED_RANK):
            raise ValueError(f"unknown solver mode {self.mode!r}")


@dataclass
class SolverState:
    eta: np.ndarray
    lam: float
    objective_trace: List[float] = field(default_factory=list)
    rank_trace: List[int] = field(default_factory=list)
    lambda_trace: List[float] = field(default_factory=list)
    eta_max_trace: List[float] = field(default_factory=list)
    # (block, objective before, objective after, lam, eps) per block update
    block_trace: list = field(default_factory=list)
    iter: int = 0
    converged: bool = False
    final_rank: int = 0

    def fit_log_rows(self):
        return [
            (i + 1, self.objective_trace[i], self.rank_trace[i],
             self.lambda_trace[i], self.eta_max_trace[i])
            for i in range(len(self.objective_trace))
        ]


# ---------------------------------------------------------------------------
# objective pieces
# ---------------------------------------------------------------------------


def quasi_norm(x, s):
    """``(sum |x_i|^s)^(1/s)`` for ``s > 0``."""
    x = np.abs(np.asarray(x, dtype=float))
    if x.size == 0 or not x.any():
        return 0.0
    m = x.max()
    return float(m * np.sum((x / m) ** s) ** (1.0 / s))


def g_hat(v, eta, q):
    """Smooth rank penalty ``1/2 sum v^2/eta + 1/2 ||eta||_{q/(2-q)}``."""
    v = np.asarray(v, dtype=float)
    eta = np.asarray(eta, dtype=float)
    return 0.5 * float(np.sum(v ** 2 / eta)) + 0.5 * quasi_norm(eta, q / (2.0 - q))


def update_eta(v, q, eps):
    """Closed-form eta block: ``eta_r = v_r^(2-q) ||v||_q^(q-1) + eps``."""
    v = np.abs(np.asarray(v, dtype=float))
    nq = quasi_norm(v, q)
    if nq == 0.0:
        return np.full(v.shape, float(eps))
    return v ** (2.0 - q) * nq ** (q - 1.0) + eps


def update_lambda(lambda0, eta):
    return float(lambda0 * np.max(eta))


def eta_floor(v, eps_rel):
    return eps_rel * (1.0 + float(np.max(v)))


def _residual_loss(phi, factors, y):
    r = y - _accel.cp_evaluate(phi, factors)
    return 0.5 * float(r @ r)


def _penalty(factors, eta, lam, q, mode):
    if mode == FIXED_RANK:
        return 0.5 * lam * float(np.sum(factors ** 2))
    return lam * g_hat(group_norms(factors), eta, q)


def objective(model, data, eta, lam, q, mode=GROUP_SPARSE):
    """Regularized objective of ``model`` on the labeled ``data``."""
    phi = model.bases.evaluate(data.phys)
    return (_residual_loss(phi, model.factors, np.asarray(data.outputs, dtype=float))
            + _penalty(model.factors, eta, lam, q, mode))


# ---------------------------------------------------------------------------
# factor block
# ---------------------------------------------------------------------------


def design_matrix(phi_k, w):
    """Rows ``vec(phi_k[n] w[n]^T)`` (column-major vec), shape ``(N, R (p+1))``."""
    N, P = phi_k.shape
    R = w.shape[1]
    return (w[:, :, None] * phi_k[:, None, :]).reshape(N, R * P)


def init_first_fit(phi_k, R):
    """Design matrix of the first cold-start update of a mode.

    Every row stacks ``R`` copies of the mode's basis vector, which is the
    general design with all other row products replaced by ones.
    """
    return design_matrix(phi_k, np.ones((phi_k.shape[0], R)))


def solve_block(Phi, y, weights, lam):
    """Solve ``(Phi^T Phi + lam diag(weights)) x = Phi^T y`` by Cholesky.

    One jitter retry of ``1e-10 * trace / size`` on failure.
    """
    A = Phi.T @ Phi
    A[np.diag_indices_from(A)] += lam * weights
    rhs = Phi.T @ y
    try:
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(A, lower=True), rhs)
    except (np.linalg.LinAlgError, ValueError):
        pass
    jitter = 1e-10 * max(float(np.trace(A)), 1e-300) / A.shape[0]
    A[np.diag_indices_from(A)] += jitter
    try:
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(A, lower=True), rhs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"normal equations not positive definite after jitter: {exc}")


def _block_weights(eta, P, mode):
    if mode == FIXED_RANK:
        return np.ones(len(eta) * P)
    return np.repeat(1.0 / np.asarray(eta, dtype=float), P)


def update_factor(model, data, k, eta, lam, mode=GROUP_SPARSE):
    """Exact minimizer over factor ``k`` (zero-based), others held fixed."""
    phi = model.bases.evaluate(data.phys)
    rows = _accel.mode_products(phi, model.factors)
    w = np.prod(np.delete(rows, k, axis=1), axis=1)
    P, R = model.degree + 1, model.rank
    Phi = design_matrix(phi[:, k, :], w)
    x = solve_block(Phi, np.asarray(data.outputs, dtype=float), _block_weights(eta, P, mode), lam)
    return x.reshape(R, P).T


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def _cold_factors(d, P, R, noise, scale_noise, seed):
    # phi_0 = 1, so a first row of ones makes every row product equal one
    F = np.zeros((d, P, R))
    F[:, 0, :] = 1.0
    rng = make_rng(seed, STREAM_INIT)
    z = rng.standard_normal((d, P, R))
    s = rng.standard_normal(R)
    if noise > 0:
        F[:, 1:, :] += (noise / np.sqrt(d)) * z[:, 1:, :]
    if scale_noise > 0:
        F[:, 0, :] *= np.exp(scale_noise * s / d)[None, :]
    return F


def fit(data, space, bases, config, warm_start=None):
    """Fit a CP surrogate to labeled samples.

    Returns ``(model, state)``.  With ``warm_start`` the factors (and their
    rank) are taken from that model and eta is initialized from its
    component norms; otherwise the first update of the first mode uses the
    replicated-basis design and eta starts at ones.  A closed-form eta
    update that would raise the penalty is rejected, which keeps every block
    update a descent step.
    """
    if data.outputs is None or np.isnan(data.outputs).any():
        raise ValueError("fit needs labeled samples")
    if len(data) < 1:
        raise ValueError("fit needs at least one sample")
    y = np.asarray(data.outputs, dtype=float)
    phi = bases.evaluate(data.phys)
    N, d, P = phi.shape
    mode = config.mode
    q = config.q

    if warm_start is not None:
        F = np.array(warm_start.factors, dtype=float)
        if F.shape[:2] != (d, P):
            raise ValueError("warm start model has incompatible shape")
        cold = False
    else:
        F = _cold_factors(d, P, config.rank, config.init_noise, config.init_scale_noise, config.seed)
        cold = True
    R = F.shape[2]

    if mode == FIXED_RANK:
        eta = np.ones(R)
        lam = float(config.lambda0)
    elif cold:
        eta = np.ones(R)
        lam = update_lambda(config.lambda0, eta)
    else:
        v = group_norms(F)
        eta = update_eta(v, q, eta_floor(v, config.eps_rel))
        lam = update_lambda(config.lambda0, eta)

    state = SolverState(eta=eta, lam=lam)
    track = config.track_blocks

    def obj(F_, eta_, lam_):
        return _residual_loss(phi, F_, y) + _penalty(F_, eta_, lam_, q, mode)

    rows = _accel.mode_products(phi, F)
    for it in range(config.max_iters):
        F_old = F.copy()
        suffix = _accel.suffix_products(rows)
        left = np.ones((N, R))
        weights = _block_weights(eta, P, mode)
        for k in range(d):
            if track:
                before = obj(F, eta, lam)
            if cold and it == 0 and k == 0:
                Phi = init_first_fit(phi[:, 0, :], R)
            else:
                Phi = design_matrix(phi[:, k, :], left * suffix[:, k, :])
            x = solve_block(Phi, y, weights, lam)
            F[k] = x.reshape(R, P).T
            rows[:, k, :] = phi[:, k, :] @ F[k]
            left *= rows[:, k, :]
            if track and not (cold and it == 0 and k == 0):
                state.block_trace.append((k, before, obj(F, eta, lam), lam, 0.0))

        if mode == GROUP_SPARSE:
            v = group_norms(F)
            eps = eta_floor(v, config.eps_rel)
            if track:
                before = obj(F, eta, lam)
            eta_new = update_eta(v, q, eps)
            # for q < 1 the floor on dead components shifts the quasi-norm
            # term by ~eps^(q/(2-q)), so the closed form can lose to the old eta
            if q == 1.0 or g_hat(v, eta_new, q) <= g_hat(v, eta, q):
                eta = eta_new
            if track:
                state.block_trace.append((d, before, obj(F, eta, lam), lam, eps))
            lam = update_lambda(config.lambda0, eta)

        cur = obj(F, eta, lam)
        if config.extrapolate and it > 0:
            step = (it + 1) ** (1.0 / 3.0)
            F_try = F + step * (F - F_old)
            val = obj(F_try, eta, lam)
            if val < cur:
                if track:
                    state.block_trace.append((d + 1, cur, val, lam, 0.0))
                F, cur = F_try, val
                rows = _accel.mode_products(phi, F)

        state.iter = it + 1
        state.objective_trace.append(cur)
        state.rank_trace.append(int(prune_mask(F, config.prune_tau).sum())
                                if mode == GROUP_SPARSE else R)
        state.lambda_trace.append(lam)
        state.eta_max_trace.append(float(np.max(eta)))

        change = max(
            np.linalg.norm(F[k] - F_old[k]) / (1.0 + np.linalg.norm(F_old[k]))
            for k in range(d)
        )
        if change < config.tol:
            state.converged = True
            break

    state.eta = eta
    state.lam = lam
    if mode == GROUP_SPARSE:
        keep = prune_mask(F, config.prune_tau)
        F = F[:, :, keep]
        state.eta = eta[keep]
    state.final_rank = F.shape[2]
    meta = {
        "seed": int(config.seed),
        "q": float(q),
        "lambda0": float(config.lambda0),
        "mode": mode,
        "iterations": state.iter,
        "objective_trace_tail": [float(v) for v in state.objective_trace[-5:]],
    }
    log.debug("fit: %d iterations, rank %d -> %d", state.iter, R, state.final_rank)
    return CpModel(F, space, bases, meta), state


def fit_continuation(data, space, bases, config, polish_lambda0=1e-7, polish_iters=2000,
                     polish_tol=1e-10, warm_start=None):
    """Two-stage fit: rank detection at ``config.lambda0``, then a polish.

    The first stage is a plain :func:`fit`.  The second restarts from the
    pruned model with a much smaller ``lambda0`` (and extrapolation on) to
    remove the shrinkage bias of the first stage without reopening pruned
    components.  Returns ``(model, (state1, state2))``.
    """
    model, first = fit(data, space, bases, config, warm_start)
    cfg = replace(config, lambda0=float(polish_lambda0), max_iters=int(polish_iters),
                  tol=float(polish_tol), extrapolate=True)
    model, second = fit(data, space, bases, cfg, warm_start=model)
    model.fit_meta["lambda0_detect"] = float(config.lambda0)
    return model, (first, second)


def cross_validate_lambda0(data, space, bases, config, grid=LAMBDA0_GRID, folds=5,
                           warm_start=None):
    """Pick ``lambda0`` from ``grid`` by k-fold validation RMSE."""
    n = len(data)
    folds = max(2, min(folds, n))
    perm = make_rng(config.seed, STREAM_CV).permutation(n)
    parts = np.array_split(perm, folds)
    scores = []
    for lam0 in grid:
        cfg = replace(config, lambda0=float(lam0), track_blocks=False)
        sq = 0.0
        for i in range(folds):
            test = parts[i]
            train = np.concatenate([parts[j] for j in range(folds) if j != i])
            model, _ = fit(data.subset(train), space, bases, cfg, warm_start)
            res = data.outputs[test] - model.predict(data.phys[test])
            sq += float(res @ res)
        scores.append(np.sqrt(sq / n))
    best = int(np.argmin(scores))
    return float(grid[best]), scores


def write_fit_log(path, state):
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "objective", "rank", "lambda", "max_eta"])
        for row in state.fit_log_rows():
            w.writerow([row[0], repr(row[1]), row[2], repr(row[3]), repr(row[4])])
