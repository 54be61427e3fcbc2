"""Exception types shared across the solver."""


class SolverError(Exception):
    """Base class for all errors raised by this package."""


class NotPositiveDefinite(SolverError):
    """A Cholesky pivot was non-positive or non-finite."""


class DimensionMismatch(SolverError, ValueError):
    pass


class ZeroVector(SolverError, ValueError):
    pass


class Dimension1(SolverError, ValueError):
    """The null space of a nonzero vector in R^1 is trivial."""


class ZeroHorizon(SolverError, ValueError):
    pass


class PoleAtTauM(SolverError, ZeroDivisionError):
    pass


class DegenerateConicStep(SolverError):
    """The conic dogleg produced no usable step; shrink the radius and retry."""


class UnknownProblem(SolverError, KeyError):
    pass


class BadDimension(SolverError, ValueError):
    pass
