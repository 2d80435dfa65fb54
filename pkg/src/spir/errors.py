"""Exception hierarchy shared by every module of the package."""


class SpirError(Exception):
    """Base class for all package errors."""


class NotPrime(SpirError, ValueError):
    pass


class FieldMismatch(SpirError, ValueError):
    pass


class DivisionByZero(SpirError, ZeroDivisionError):
    pass


class FieldTooSmall(SpirError, ValueError):
    pass


class DimensionTooLarge(SpirError, ValueError):
    pass


class DimensionMismatch(SpirError, ValueError):
    pass


class Singular(SpirError, ArithmeticError):
    """Raised when a square system has no unique solution."""


class BadIndex(SpirError, IndexError):
    pass


class BudgetExceeded(SpirError, ValueError):
    """An adversary or enumeration exceeded its allowed size."""


class InvalidParams(SpirError, ValueError):
    """Scheme parameters violate one of the validity inequalities.

    The message names the violated inequality, e.g. ``requires N > 2B+T``.
    """
