"""Exception types shared across the package."""


class ZenomapError(Exception):
    """Base class for all package-specific errors."""


class InvalidStateError(ZenomapError, ValueError):
    """A wave-function argument is not normalized within tolerance."""


class TruncationOverflowError(ZenomapError, RuntimeError):
    """Probability has reached the edge of the truncated momentum window.

    Results past this point would silently lose norm, so the offending
    operation aborts instead. ``edge`` is ``"lower"``, ``"upper"`` or
    ``"both"``; ``occupation`` is the total probability on the edge bins.
    """

    def __init__(self, message: str, edge: str = "", occupation: float = 0.0):
        super().__init__(message)
        self.edge = edge
        self.occupation = occupation


class NoLocalizationError(ZenomapError, RuntimeError):
    """An occupation profile has no decaying exponential envelope.

    Raised by the localization-length fit when the log-profile slope is
    non-negative, which is the expected outcome for delocalized states
    (for example under frequent full measurement).
    """


class ConfigError(ZenomapError, ValueError):
    """A run configuration document is malformed or violates a constraint."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        detail = message
        if key is not None and line is not None:
            detail = f"{message} (key '{key}', line {line})"
        elif key is not None:
            detail = f"{message} (key '{key}')"
        elif line is not None:
            detail = f"{message} (line {line})"
        super().__init__(detail)
        self.key = key
        self.line = line
