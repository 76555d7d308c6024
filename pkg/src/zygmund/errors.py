"""Exception types raised by the package."""


class ZygmundError(Exception):
    """Base class for all package errors."""


class ConfigError(ZygmundError, ValueError):
    """Malformed descriptor, config file or argument."""


class ConstraintViolated(ZygmundError, ValueError):
    """A parameter constraint required by an order estimate does not hold."""


class EmptySequence(ZygmundError, ValueError):
    pass


class NumericalFailure(ZygmundError, ArithmeticError):
    """Base for failures of a numerical procedure to meet its tolerance."""


class DerivativeZero(NumericalFailure):
    """The right derivative vanishes, so the alpha-characteristic is undefined."""


class DivergentTail(NumericalFailure):
    """A tail series required by the computation does not converge."""


class SlowConvergence(NumericalFailure):
    """The term cap was reached before the requested tolerance."""


class QuadratureNotConverged(NumericalFailure):
    pass
