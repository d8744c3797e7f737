class ClusterGeomError(Exception):
    """Base class for all package errors."""


class ValidationError(ClusterGeomError, ValueError):
    """Input data violates a structural invariant."""


class UnsupportedError(ClusterGeomError, ValueError):
    """The input is valid but outside the supported range of the method."""


class PreconditionError(ClusterGeomError, ValueError):
    """A documented precondition of an operation was violated."""


class LaurentViolation(ClusterGeomError):
    """An expression expected to be a Laurent polynomial is not one.

    This is never expected to fire for correct inputs; it exists as a hard
    check of the Laurent phenomenon.
    """

    def __init__(self, message, path=(), expression=None):
        super().__init__(message)
        self.path = tuple(path)
        self.expression = expression


class ResourceLimitExceeded(ClusterGeomError):
    """A configured size cap (term count, exponent magnitude) was hit."""
