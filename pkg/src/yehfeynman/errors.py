"""Exception and warning types raised across the package."""


class GridMismatchError(ValueError):
    """Two grid-valued objects live on different grids."""


class InvalidFunctionError(ValueError):
    """A sampled function produced non-finite values."""


class DegenerateParameterError(ValueError):
    """A parameter combination makes a reciprocal sum vanish."""


class HypothesisError(ValueError):
    """A kernel relation required by an identity does not hold on the grid."""


class SupportWarning(UserWarning):
    """A kernel vanishes at one or more cell midpoints."""
