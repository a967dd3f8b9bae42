"""Shared exception types."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class PreconditionError(ValueError):
    """A documented precondition of the operation is violated."""


class SolverError(RuntimeError):
    """An iterative solver failed to converge or to bracket a root."""


class NoSolutionError(SolverError):
    """The requested object provably does not exist for these parameters."""


class AmbiguityError(SolverError):
    """A map assumed monotone turned out not to be; branches are reported."""


class TruncationWarning(UserWarning):
    """Resampling pushed part of the field outside the grid."""
