"""CP-format gPC surrogate.

The coefficient tensor is kept as ``d`` factor matrices of shape
``(p + 1, R)``, stacked into one ``(d, p + 1, R)`` array.  The surrogate value
at a point is ``sum_r prod_k phi_k(x_k) @ U_k[:, r]``; the dense coefficient
tensor is only built by :meth:`CpModel.densify` for small test problems.
"""

import json

import numpy as np

from tensorgpc import _accel
from tensorgpc.basis import BasisBundle
from tensorgpc.errors import SizeError
from tensorgpc.paramspace import ParameterSpace

MODEL_VERSION = 1
DENSE_CAP = 10**7
DEFAULT_PRUNE_TAU = 1e-4
_BATCH = 4096


class CpModel:
    """Low-rank surrogate ``y(x) = <X, B(x)>`` with ``X`` in CP form.

    Parameters
    ----------
    factors : array_like, shape (d, p + 1, R)
        Factor matrices; ``factors[k][:, r]`` is ``u_r`` of mode ``k``.
    space : ParameterSpace
    bases : BasisBundle, optional
        Built from ``space`` and the factor height when omitted.
    fit_meta : dict, optional
        Provenance written into the model file.
    """

    def __init__(self, factors, space, bases=None, fit_meta=None):
        factors = np.array(factors, dtype=float)
        if factors.ndim != 3:
            raise ValueError("factors must have shape (d, p + 1, R)")
        d, P, R = factors.shape
        if R < 1:
            raise ValueError("rank must be >= 1")
        if d != space.dim:
            raise ValueError(f"factor count {d} does not match space dimension {space.dim}")
        if bases is None:
            bases = BasisBundle(space, P - 1)
        elif bases.degree != P - 1 or bases.dim != d:
            raise ValueError("basis bundle does not match factor shapes")
        factors.setflags(write=False)
        self.factors = factors
        self.space = space
        self.bases = bases
        self.fit_meta = dict(fit_meta or {})

    @classmethod
    def constant(cls, space, p, value=1.0, rank=1):
        """Model equal to ``value`` everywhere (only ``phi_0`` coefficients)."""
        f = np.zeros((space.dim, p + 1, rank))
        f[:, 0, :] = 1.0
        f[0, 0, :] = value / rank
        return cls(f, space)

    @property
    def dim(self):
        return self.factors.shape[0]

    @property
    def degree(self):
        return self.factors.shape[1] - 1

    @property
    def rank(self):
        return self.factors.shape[2]

    def with_factors(self, factors, fit_meta=None):
        meta = self.fit_meta if fit_meta is None else fit_meta
        return CpModel(factors, self.space, self.bases, meta)

    # -- evaluation --------------------------------------------------------

    def predict(self, X):
        """Surrogate values at the rows of ``X`` (physical coordinates)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty(X.shape[0])
        for s in range(0, X.shape[0], _BATCH):
            phi = self.bases.evaluate(X[s:s + _BATCH])
            out[s:s + _BATCH] = _accel.cp_evaluate(phi, self.factors)
        return out

    def evaluate(self, xi):
        """Surrogate value at a single physical point."""
        return float(self.predict(np.asarray(xi, dtype=float)[None, :])[0])

    def gradient_batch(self, X):
        """Gradients with respect to the physical coordinates, shape ``(N, d)``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty(X.shape)
        for s in range(0, X.shape[0], _BATCH):
            block = X[s:s + _BATCH]
            phi = self.bases.evaluate(block)
            dphi = self.bases.derivative(block)
            rows = _accel.mode_products(phi, self.factors)
            drows = _accel.mode_products(dphi, self.factors)
            loo = _accel.loo_products(rows)
            out[s:s + _BATCH] = (drows * loo).sum(axis=2)
        return out

    def gradient(self, xi):
        return self.gradient_batch(np.asarray(xi, dtype=float)[None, :])[0]

    def khatri_rao_row(self, k, xi):
        """Reduced mode-``k`` design block ``phi_k(x_k) (*)_{j != k} phi_j(x_j)^T U_j``.

        ``k`` is zero-based.  Returns a ``(p + 1, R)`` matrix without forming
        the ``(p + 1)^(d - 1)``-column unfolding.
        """
        phi = self.bases.evaluate(np.asarray(xi, dtype=float)[None, :])
        rows = _accel.mode_products(phi, self.factors)[0]
        w = np.prod(np.delete(rows, k, axis=0), axis=0)
        return np.outer(phi[0, k], w)

    # -- structure -----------------------------------------------------------

    def group_norms(self):
        """Per-component norms ``v_r = sqrt(sum_k ||u_r^(k)||^2)``."""
        return group_norms(self.factors)

    def prune_rank(self, tau=DEFAULT_PRUNE_TAU):
        """Drop components with ``v_r < tau * max(v)``; at least one is kept."""
        keep = prune_mask(self.factors, tau)
        if keep.all():
            return self
        return self.with_factors(self.factors[:, :, keep])

    def densify(self):
        """Dense ``(p + 1)^d`` coefficient tensor (test oracle only)."""
        d, P, R = self.factors.shape
        if P ** d > DENSE_CAP:
            raise SizeError(f"dense tensor of {P}^{d} entries exceeds cap {DENSE_CAP}")
        out = np.zeros((P,) * d)
        for r in range(R):
            comp = self.factors[0, :, r]
            for k in range(1, d):
                comp = np.multiply.outer(comp, self.factors[k, :, r])
            out = out + comp
        return out

    # -- serialization ---------------------------------------------------------

    def to_dict(self):
        d, P, R = self.factors.shape
        return {
            "version": MODEL_VERSION,
            "degree": P - 1,
            "rank": R,
            "marginals": [m.to_dict() for m in self.space.marginals],
            "factors": self.factors.tolist(),
            "fit_meta": self.fit_meta,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def from_dict(cls, obj):
        if obj.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {obj.get('version')!r}")
        space = ParameterSpace.from_dict({"marginals": obj["marginals"]})
        factors = np.asarray(obj["factors"], dtype=float)
        if factors.shape[1:] != (obj["degree"] + 1, obj["rank"]):
            raise ValueError("factor array does not match degree/rank fields")
        return cls(factors, space, fit_meta=obj.get("fit_meta"))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def group_norms(factors):
    return np.sqrt(np.einsum("dpr,dpr->r", factors, factors))


def prune_mask(factors, tau):
    v = group_norms(factors)
    vmax = v.max()
    if tau <= 0 or vmax == 0:
        return np.ones(v.shape, dtype=bool)
    keep = v >= tau * vmax
    if not keep.any():
        keep[np.argmax(v)] = True
    return keep


def evaluate(model, xi):
    return model.evaluate(xi)


def gradient(model, xi):
    return model.gradient(xi)


def khatri_rao_row(model, k, xi):
    return model.khatri_rao_row(k, xi)


def densify(model):
    return model.densify()


def prune_rank(model, tau=DEFAULT_PRUNE_TAU):
    return model.prune_rank(tau)


def dense_basis(bases, xi):
    """Rank-1 dense basis tensor ``B(x)`` at one point (test oracle only)."""
    phi = bases.evaluate(np.asarray(xi, dtype=float)[None, :])[0]
    d, P = phi.shape
    if P ** d > DENSE_CAP:
        raise SizeError(f"dense tensor of {P}^{d} entries exceeds cap {DENSE_CAP}")
    out = phi[0]
    for k in range(1, d):
        out = np.multiply.outer(out, phi[k])
    return out
