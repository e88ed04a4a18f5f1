"""Error and warning types shared across the package."""


class TreegreenError(Exception):
    """Base class for all package-specific errors."""


class ArgumentError(TreegreenError, ValueError):
    """An operation was called with arguments outside its contract."""


class RangeError(TreegreenError, ValueError):
    """A numeric parameter lies outside its admissible range."""


class SchemaError(TreegreenError, ValueError):
    """A configuration document does not match the expected schema.

    The message carries the path of the offending field.
    """


class BudgetError(TreegreenError):
    """A requested computation exceeds a configured resource budget."""


class BandEdgeError(TreegreenError):
    """Boundary-value evaluation was requested at or outside a spectral edge
    where the limiting object does not exist."""


class IllConditionedError(TreegreenError):
    """A numerical extrapolation or solve cannot meet its declared
    uncertainty budget."""


class DegenerateMapError(TreegreenError):
    """A Moebius map degenerates (identity-like or non-invertible) and has
    no isolated fixed points."""


class AlphaRangeError(TreegreenError, ValueError):
    """A quantile level, or a composed quantile level, leaves (0, 1/2]."""


class ZeroGammaError(TreegreenError):
    """A resolvent sample is exactly zero, so its logarithm is undefined."""


class BandViolationError(TreegreenError):
    """An energy interval was required to lie inside the computed
    absolutely-continuous bands but does not."""


class ConvergenceWarning(UserWarning):
    """Iteration budget exhausted before the convergence criterion was met."""


class GridTooCoarseWarning(UserWarning):
    """A scan grid is too coarse to resolve a located feature reliably."""
