"""Exception hierarchy shared by every module."""


class WishartMinorsError(Exception):
    """Base class for all package errors."""


class DomainError(WishartMinorsError, ValueError):
    """An argument lies outside the region where the quantity is defined."""


class NotPositiveDefinite(DomainError):
    """Cholesky factorisation hit a pivot at or below tolerance."""


class SingularBlock(DomainError):
    """The pivot block of a Schur complement is not invertible."""


class ConvergenceFailure(WishartMinorsError, ArithmeticError):
    """An iterative linear-algebra routine did not converge."""


class NotConverged(WishartMinorsError, ArithmeticError):
    """A truncated series did not meet its tolerance within the degree cap."""


class NonFinite(WishartMinorsError, ArithmeticError):
    """A Monte Carlo weight overflowed or became NaN."""
