"""Exception hierarchy.

DomainError covers violations of mathematical preconditions (exit code 2 at
the CLI); NumericalError covers solver breakdowns (exit code 1).
"""


class DghError(Exception):
    """Base class for all package errors."""


class DomainError(DghError, ValueError):
    """Input lies outside the mathematical domain of the operation."""


class OutOfRangeError(DomainError):
    pass


class PoleAtC1Error(DomainError):
    pass


class NoOrbitError(DomainError):
    pass


class ComplexBranchError(DomainError):
    pass


class EmptyLevelSetError(DomainError):
    pass


class QZeroError(DomainError):
    pass


class PeakedProfileError(DomainError):
    pass


class NotSymmetricError(DomainError):
    pass


class SingularWeightError(DomainError):
    pass


class PeriodUnreachableError(DomainError):
    pass


class ParamMismatchError(DomainError):
    pass


class StencilLeavesRegionError(DomainError):
    pass


class StencilLeavesCurveError(DomainError):
    pass


class NumericalError(DghError, RuntimeError):
    """A numerical procedure failed to converge or blew up."""


class NonConvergentError(NumericalError):
    pass


class IntegrationFailureError(NumericalError):
    pass


class EigensolverFailureError(NumericalError):
    pass
