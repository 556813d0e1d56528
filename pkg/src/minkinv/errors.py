"""Exception hierarchy shared by all minkinv modules."""
from __future__ import annotations


class MinkinvError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatchError(MinkinvError, ValueError):
    """Operands have incompatible shapes (non-square, metric/matrix size, ...)."""


class DiagnosticError(MinkinvError):
    """A numerical ambiguity or solver failure that must not be silently resolved.

    Raised when two routes that must agree disagree beyond tolerance, when a
    spectral split conflicts with the rank-of-powers information, or when an
    eigen/least-squares solver fails.  The caller gets the evidence in the
    message instead of a silently patched result.
    """


class NotInvertibleError(MinkinvError):
    """A generalized inverse does not exist for the given input.

    Carries the failed existence report (``exists=False``) in ``report`` when
    available, so callers can surface the violated rank test.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotMinkowskiInvertible(NotInvertibleError):
    """rk(A~A) = rk(AA~) = rk(A) fails, so the Minkowski inverse does not exist."""


class NotGroupInvertible(NotInvertibleError):
    """The matrix has index > 1, so the group inverse does not exist."""


class NotCM(NotInvertibleError):
    """The matrix has index > 1 where an index <= 1 (CM) matrix is required."""


class NotMCoreInvertible(NotInvertibleError):
    """rk(A~A) = rk(A) fails, so the m-core inverse does not exist."""


class NotMCoreEPInvertible(NotInvertibleError):
    """rk((A^k)~A^k) = rk(A^k) fails (equivalently the leading metric block is
    singular), so the m-core-EP inverse does not exist."""
