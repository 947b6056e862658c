"""Exception hierarchy shared by all ghzsim modules."""


class GhzSimError(Exception):
    """Base class for every error raised by ghzsim."""


class ValidationError(GhzSimError, ValueError):
    """An argument or intermediate object violates its contract."""


class SizeError(ValidationError):
    """Qubit count or matrix dimension out of the supported range."""


class QubitIndexError(GhzSimError, IndexError):
    """Duplicate or out-of-range qubit target."""


class CalibrationError(GhzSimError):
    """Calibration input cannot be used (e.g. singular confusion matrix)."""


class FitError(GhzSimError):
    """Least-squares design is degenerate."""


class CircuitParseError(GhzSimError, ValueError):
    """Malformed line in the circuit text format."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
