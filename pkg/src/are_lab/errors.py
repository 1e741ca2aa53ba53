"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so each class carries the code it
should produce.
"""


class AreLabError(Exception):
    exit_code = 3


class ConfigError(AreLabError, ValueError):
    """Invalid user configuration (alpha + beta >= 1, bad grid, ...)."""

    exit_code = 2


class DomainError(ConfigError):
    """Parameter outside the model's parameter space."""


class TieError(ConfigError):
    """Repeated value inside one coordinate of a sample."""

    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"tied values in column {column!r}")


class SampleSizeError(ConfigError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericError(AreLabError):
    """A numerical routine failed (root finding, inversion, ...)."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class ConvergenceError(NumericError):
    def __init__(self, message, estimate=None, diagnostics=None):
        self.estimate = estimate
        super().__init__(message, diagnostics)


class DegeneracyError(NumericError):
    """Asymptotic variance too close to zero for a z-test to make sense."""


class InconclusiveError(NumericError):
    pass


class SearchCapError(NumericError):
    pass
