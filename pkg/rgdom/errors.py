class RgdomError(Exception):
    """Root of every error raised by the rgdom package."""


class ParameterError(RgdomError, ValueError):
    """A numeric parameter or vertex id is outside its valid range."""


class GraphParseError(RgdomError, ValueError):
    """Malformed graph text. `line` is 1-based (0 when not line specific)."""

    def __init__(self, message, line=0):
        self.line = line
        if line:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(RgdomError, ValueError):
    """Invalid experiment configuration, detected before any trial runs."""


class InvariantViolation(RgdomError, RuntimeError):
    """A checked invariant failed. `details` holds the diagnostic dump."""

    def __init__(self, message, details=None):
        self.details = details or {}
        super().__init__(message)

    def __reduce__(self):
        # keep the dump when the error crosses a process boundary
        return type(self), (self.args[0], self.details)


class HarnessError(RgdomError):
    """Artifact emission failed. `path` names the file involved."""

    def __init__(self, message, path=None):
        self.path = path
        if path is not None:
            message = f"{message} ({path})"
        super().__init__(message)
