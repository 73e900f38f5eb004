"""Exception types shared across the package."""


class StickSlipError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(StickSlipError, ValueError):
    """A configuration or model parameter is out of its valid domain."""


class InputError(StickSlipError, ValueError):
    """An input sample is unusable, e.g. a non-finite position."""


class TraceParseError(StickSlipError, ValueError):
    """A trace file line could not be parsed. Carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class TraceValidationError(StickSlipError, ValueError):
    """A trace parsed but violates an ordering or content rule."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class UndefinedJndError(StickSlipError, ValueError):
    """The just-noticeable difference is undefined for the given fit."""


class UnsupportedDfError(StickSlipError, ValueError):
    """Requested degrees of freedom fall outside the supported range."""
