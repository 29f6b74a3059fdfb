"""Exception types raised across the package."""


class TRAError(Exception):
    """Base class for all package errors."""


class DomainError(TRAError, ValueError):
    """A parameter or argument lies outside the admissible domain."""


class PoleError(DomainError):
    """Argument sits on a pole of the gamma function."""


class SeriesError(TRAError, ZeroDivisionError):
    """A denominator Pochhammer symbol vanished before the series terminated."""


class AsymmetryError(TRAError):
    """Two expressions that must agree for a symmetric form do not."""


class ConvergenceError(TRAError):
    """An iterative procedure did not reach its tolerance."""


class NotPositiveDefiniteError(TRAError):
    """Cholesky factorization met a non-positive pivot."""

    def __init__(self, index, pivot):
        super().__init__(f"matrix not positive definite: pivot {index} = {pivot:.6g}")
        self.index = index
        self.pivot = pivot


class FitError(TRAError):
    """A least-squares fit left a residual above its threshold."""


class ConfigError(TRAError):
    """Invalid run configuration."""
