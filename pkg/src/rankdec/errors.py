"""Exception types raised across the package."""


class RankDecError(Exception):
    """Base class for all package errors."""


class InvalidParameters(RankDecError, ValueError):
    pass


class NotPrimePower(InvalidParameters):
    pass


class GcdViolation(InvalidParameters):
    pass


class DegreeViolation(InvalidParameters):
    pass


class ShapeMismatch(RankDecError, ValueError):
    pass


class RankTooLarge(InvalidParameters):
    pass


class RadiusTooLarge(InvalidParameters):
    pass


class BudgetExceeded(RankDecError):
    pass


class ParameterInfeasible(InvalidParameters):
    pass


class EmptyBlock(RankDecError):
    pass


class FormatError(RankDecError, ValueError):
    pass


class DivisionByZero(RankDecError, ZeroDivisionError):
    pass
