class AcDcGuardError(Exception):
    """
    base class of everything this package raises on purpose
    """


class ConfigError(AcDcGuardError, ValueError):
    """
    bad parameters, unknown config keys, unknown channels
    """


class NumericalError(AcDcGuardError, ArithmeticError):
    """
    a numerical routine failed to produce a trustworthy result
    """


class MarginallyStableError(NumericalError):
    """
    I - A is singular, the model has no finite dc gain
    """


class InfeasibleError(AcDcGuardError):
    """
    an optimization problem has no solution that callers asked for
    """


class DegreeTooLowError(InfeasibleError):
    """
    no residual generator exists at the requested polynomial degree
    """
