"""Orthonormal univariate polynomial bases built from three-term recurrences.

For a marginal with center ``c`` and scale ``s`` the basis is evaluated in the
standardized variable ``t = (x - c) / s`` through

    b[j+1] phi[j+1](t) = (t - a[j]) phi[j](t) - b[j] phi[j-1](t),

with ``phi[0] = 1``.  Uniform marginals use normalized Legendre coefficients
(``a = 0``, ``b[j] = j / sqrt(4 j^2 - 1)``), Gaussian marginals normalized
probabilists' Hermite (``a = 0``, ``b[j] = sqrt(j)``).
"""

from dataclasses import dataclass

import numpy as np

from tensorgpc.paramspace import Gaussian, Uniform


def recurrence_coefficients(marginal, p):
    """Return ``(a, b)`` of lengths ``p + 1`` and ``p + 2`` (``b[0]`` unused)."""
    j = np.arange(p + 2, dtype=float)
    a = np.zeros(p + 1)
    b = np.zeros(p + 2)
    if isinstance(marginal, Uniform):
        b[1:] = j[1:] / np.sqrt(4.0 * j[1:] ** 2 - 1.0)
    elif isinstance(marginal, Gaussian):
        b[1:] = np.sqrt(j[1:])
    else:
        raise TypeError(f"unsupported marginal {marginal!r}")
    return a, b


def _recurrence(t, a, b, p):
    # t: (...,), a: (..., p+1), b: (..., p+2) broadcast against t
    out = np.empty(t.shape + (p + 1,))
    out[..., 0] = 1.0
    if p >= 1:
        out[..., 1] = (t - a[..., 0]) / b[..., 1]
    for j in range(1, p):
        out[..., j + 1] = ((t - a[..., j]) * out[..., j] - b[..., j] * out[..., j - 1]) / b[..., j + 1]
    return out


def _recurrence_deriv(t, a, b, p, vals):
    # differentiated recurrence, in the standardized variable
    out = np.zeros(t.shape + (p + 1,))
    if p >= 1:
        out[..., 1] = 1.0 / b[..., 1]
    for j in range(1, p):
        out[..., j + 1] = ((t - a[..., j]) * out[..., j] + vals[..., j]
                           - b[..., j] * out[..., j - 1]) / b[..., j + 1]
    return out


@dataclass(frozen=True)
class UnivariateBasis:
    """Orthonormal polynomials ``phi_0 .. phi_p`` for one marginal."""

    marginal: object
    degree: int
    a: np.ndarray
    b: np.ndarray

    def _standardize(self, x):
        return (np.asarray(x, dtype=float) - self.marginal.center) / self.marginal.scale

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Basis values; shape ``x.shape + (p + 1,)``."""
        return _recurrence(self._standardize(x), self.a, self.b, self.degree)

    def derivative(self, x):
        """First derivatives ``d phi_j / dx``; shape ``x.shape + (p + 1,)``."""
        t = self._standardize(x)
        vals = _recurrence(t, self.a, self.b, self.degree)
        return _recurrence_deriv(t, self.a, self.b, self.degree, vals) / self.marginal.scale


def build_basis(marginal, p):
    if p < 0:
        raise ValueError("degree must be >= 0")
    a, b = recurrence_coefficients(marginal, p)
    return UnivariateBasis(marginal, int(p), a, b)


def eval_basis(basis, x):
    return basis.evaluate(x)


def eval_basis_deriv(basis, x):
    return basis.derivative(x)


class BasisBundle:
    """One univariate basis per parameter, evaluated jointly over samples."""

    def __init__(self, space, p):
        self.space = space
        self.degree = int(p)
        self.bases = [build_basis(m, p) for m in space.marginals]
        self._center = np.array([m.center for m in space.marginals])
        self._scale = np.array([m.scale for m in space.marginals])
        self._a = np.stack([bs.a for bs in self.bases])
        self._b = np.stack([bs.b for bs in self.bases])

    def __len__(self):
        return len(self.bases)

    @property
    def dim(self):
        return len(self.bases)

    def _standardize(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise ValueError(f"expected {self.dim} columns, got {X.shape[1]}")
        return (X - self._center) / self._scale

    def evaluate(self, X):
        """Basis tensor factors for N points: array ``(N, d, p + 1)``."""
        T = self._standardize(X)
        return _recurrence(T, self._a[None], self._b[None], self.degree)

    def derivative(self, X):
        """Derivatives of every univariate basis: array ``(N, d, p + 1)``."""
        T = self._standardize(X)
        vals = _recurrence(T, self._a[None], self._b[None], self.degree)
        der = _recurrence_deriv(T, self._a[None], self._b[None], self.degree, vals)
        return der / self._scale[None, :, None]


def gauss_rule(marginal, n=64):
    """Gauss quadrature nodes (physical variable) and probability weights."""
    if isinstance(marginal, Uniform):
        t, w = np.polynomial.legendre.leggauss(n)
        w = w / 2.0
    elif isinstance(marginal, Gaussian):
        t, w = np.polynomial.hermite_e.hermegauss(n)
        w = w / np.sqrt(2.0 * np.pi)
    else:
        raise TypeError(f"unsupported marginal {marginal!r}")
    return marginal.center + marginal.scale * t, w
