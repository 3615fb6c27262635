"""Exception hierarchy. The CLI maps each class to an exit status."""


class NystromLabError(Exception):
    exit_code = 1


class ConfigError(NystromLabError, ValueError):
    exit_code = 2


class InputError(NystromLabError, ValueError):
    """Malformed numeric input (non-finite entries, shape mismatch)."""

    exit_code = 3


class DataError(InputError):
    """Dataset file could not be parsed or is inconsistent."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DomainError(NystromLabError, ValueError):
    """Input outside the mathematical domain of the operation (e.g. indefinite matrix)."""

    exit_code = 4


class NumericalError(NystromLabError, ArithmeticError):
    exit_code = 4
