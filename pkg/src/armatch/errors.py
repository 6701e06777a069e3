"""Exception hierarchy shared across the package."""


class ArMatchError(Exception):
    """Base class for all armatch errors."""


class NonStationary(ArMatchError):
    """AR coefficients whose companion matrix has spectral radius >= 1."""


class SingularToeplitz(ArMatchError):
    """A Toeplitz autocovariance matrix is singular (to the numerical floor)."""


class InsufficientLags(ArMatchError):
    """An autocovariance sequence is too short for the requested operation."""


class TooShort(ArMatchError):
    """The observed series is too short for the requested fit.

    Carries ``min_n``, the smallest series length for which the operation
    would be feasible, and ``max_feasible_order`` where that is the more
    useful report.
    """

    def __init__(self, message, min_n=None, max_feasible_order=None):
        super().__init__(message)
        self.min_n = min_n
        self.max_feasible_order = max_feasible_order


class SingularDesign(ArMatchError):
    """The least-squares Gram matrix is singular (e.g. a constant-zero series)."""


class DegenerateFit(ArMatchError):
    """A fitted loss value collapsed to (numerically) zero; log-loss undefined."""


class NoConvergence(ArMatchError):
    """The optimizer failed to reach the convergence criterion."""


class BootstrapFailed(ArMatchError):
    """Too many bootstrap replicates were degenerate to report a mean."""
