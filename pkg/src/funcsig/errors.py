"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Malformed or inconsistent input (shapes, grids, parameter ranges)."""


class DegenerateStatisticError(ArithmeticError):
    """The variance estimate of the statistic vanished, so T_n is undefined.

    With compactly supported kernels this means no pair of observations falls
    within one bandwidth of each other; widen ``h``.
    """


class NumericError(ArithmeticError):
    """A numerical routine failed or produced values outside tolerance."""


class RankDeficiencyError(NumericError):
    """A requested eigen-direction carries (numerically) zero variance."""
