"""Exception hierarchy shared by all modules.

The CLI maps ``ValidationError`` subclasses to exit code 1 and
``NumericalError`` subclasses to exit code 2.
"""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class DimensionError(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class PhysicalityError(ValidationError):
    pass


class ConfigurationError(ValidationError):
    pass


class LookupFailure(ValidationError, KeyError):
    pass


class ResourceError(RuntimeError):
    """Requested object would exceed a configured size cap."""


class NumericalError(ArithmeticError):
    pass


class DegenerateProjectionError(NumericalError):
    pass


class OptimizationAbort(NumericalError):
    pass


class VariationalBoundViolation(NumericalError):
    pass
