"""Exception hierarchy shared by every module."""


class EndoqreError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(EndoqreError, ValueError):
    """Input data violates a type invariant."""


class FormatError(ValidationError):
    """A text input could not be parsed.

    ``line`` is the 1-based line number of the offending line, when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(EndoqreError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConfigurationError(EndoqreError):
    """A model or campaign is missing required configuration."""


class AdapterError(EndoqreError):
    """An external-tool adapter failed."""
