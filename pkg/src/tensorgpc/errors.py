"""Exception types raised across the package."""


class TensorGPCError(Exception):
    """Base class for package errors."""


class DomainError(TensorGPCError, ValueError):
    """Input lies outside the support of a distribution or function."""


class SizeError(TensorGPCError, ValueError):
    """Requested dense object exceeds the allowed size."""


class SolverError(TensorGPCError, RuntimeError):
    """Normal equations could not be solved, even after jitter."""


class ZeroVarianceError(TensorGPCError, ValueError):
    """Sobol indices are undefined for a constant surrogate."""


class ZeroNormError(TensorGPCError, ValueError):
    """Relative error requested against an all-zero reference."""


class EmptyCellError(TensorGPCError, RuntimeError):
    """No Voronoi cell with Monte Carlo hits is left to sample from."""


class ConfigError(TensorGPCError, ValueError):
    """Run configuration failed validation."""


class SimulatorError(TensorGPCError, RuntimeError):
    """External simulator exited abnormally or produced malformed output."""
