"""Exception types shared across the package."""


class GnsError(Exception):
    """Base class for all package-specific errors."""


class ResolutionError(GnsError, ValueError):
    """A grid is too coarse for the requested spectral content."""


class DimensionError(GnsError, ValueError):
    """Coefficient data does not match the basis it is paired with."""


class ConfigError(GnsError, ValueError):
    """A scenario configuration file or value is malformed.

    ``line`` is the 1-based line number in the config file when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CsvError(GnsError, ValueError):
    """A CSV artifact is malformed; ``row`` is the offending 1-based line."""

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class DivergenceError(GnsError, RuntimeError):
    """The time integration produced a non-finite state.

    Carries the failure time and the partial trajectory accumulated up
    to the last finite sample (may be ``None`` if the very first step
    failed before any sample was stored).
    """

    def __init__(self, time, partial=None):
        self.time = time
        self.partial = partial
        super().__init__(f"non-finite state at t={time:.6g}")
