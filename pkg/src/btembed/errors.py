"""Exception types shared across the package."""


class BTError(Exception):
    """Base class; the CLI maps these to exit code 3."""


class PrecisionExhausted(BTError):
    pass


class DivisionByZero(BTError, ZeroDivisionError):
    pass


class IndistinguishableEnds(BTError):
    pass


class ShapeMismatch(BTError):
    pass


class NotContained(BTError):
    pass


class DomainViolation(BTError):
    pass


class UnsupportedKind(BTError):
    pass


class NotStabilized(BTError):
    pass


class OrbitBudgetExceeded(BTError):
    pass
