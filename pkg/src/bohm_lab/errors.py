"""Exception hierarchy shared by all bohm_lab modules."""


class BohmLabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BohmLabError, ValueError):
    """Argument outside the domain where a function is defined."""


class EvaluationError(BohmLabError, ArithmeticError):
    """A numerical evaluation failed (non-convergence, overflow)."""


class UsageError(BohmLabError, ValueError):
    """Inconsistent or unsupported arguments."""


class DegenerateFieldError(BohmLabError, ValueError):
    """Field carries no usable amplitude (all zero or fully masked)."""


class InvalidFamilyError(BohmLabError, ValueError):
    """Coefficient functions do not define a valid density f' > 0."""


class NoBoundStateError(BohmLabError, ValueError):
    """Requested bound state does not exist for the given parameters."""


class SingularIntegralError(BohmLabError, ArithmeticError):
    """Integrand has a non-integrable singularity inside the integration range."""

    def __init__(self, message, location):
        super().__init__(message)
        self.location = location


class DivergenceError(BohmLabError, ArithmeticError):
    """Time stepping produced non-finite values."""

    def __init__(self, message, step):
        super().__init__(message)
        self.step = step


class ConfigError(BohmLabError, ValueError):
    """Configuration file could not be parsed or validated."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line
