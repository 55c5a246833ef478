"""Low-rank tensor-regression polynomial chaos surrogates.

Fits CP-format gPC surrogates to black-box functions of many independent
random inputs, shrinks the CP rank with an lq/l2 group penalty, picks new
samples adaptively and extracts moments and Sobol indices in closed form.
"""

from tensorgpc.errors import (
    DomainError,
    SizeError,
    SolverError,
    ZeroNormError,
    ZeroVarianceError,
)
from tensorgpc.paramspace import (
    Gaussian,
    ParameterSpace,
    SampleSet,
    Uniform,
    inverse_transform,
    latin_hypercube,
    mc_uniform,
)
from tensorgpc.basis import BasisBundle, UnivariateBasis, build_basis
from tensorgpc.cpmodel import CpModel
from tensorgpc.solver import SolverConfig, SolverState, fit, fit_continuation
from tensorgpc.sampler import estimate_voronoi, select_next
from tensorgpc.stats import SobolReport, mean, sobol, variance

__version__ = "0.1.0"

__all__ = [
    "BasisBundle",
    "CpModel",
    "DomainError",
    "Gaussian",
    "ParameterSpace",
    "SampleSet",
    "SizeError",
    "SobolReport",
    "SolverConfig",
    "SolverError",
    "SolverState",
    "Uniform",
    "UnivariateBasis",
    "ZeroNormError",
    "ZeroVarianceError",
    "build_basis",
    "estimate_voronoi",
    "fit",
    "fit_continuation",
    "inverse_transform",
    "latin_hypercube",
    "mc_uniform",
    "mean",
    "select_next",
    "sobol",
    "variance",
]
