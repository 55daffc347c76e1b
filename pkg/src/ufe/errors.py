"""Exception hierarchy shared by every stage of the analysis."""


class UFEError(Exception):
    """Base class for all errors raised by :mod:`ufe`."""


class InvalidInputError(UFEError, ValueError):
    pass


class SchemaError(InvalidInputError):
    """Malformed CSV input. ``line`` is the 1-based line number, if known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateGroupError(InvalidInputError):
    """A residual group or cell is too small, or has zero spread, to be tested."""


class WrongPathError(UFEError):
    """A closed-form balanced estimator was called on unbalanced data."""


class InfeasibleConstraintsError(UFEError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (max |C beta - d| = {residual:.3e})")


class SequencingError(UFEError):
    """A test was run before the diagnostics it depends on passed."""
