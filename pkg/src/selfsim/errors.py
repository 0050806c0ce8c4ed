"""Exception types shared across the package."""


class SelfSimError(Exception):
    """Base class for errors raised by this package."""


class SizeCapError(SelfSimError):
    """A computation would exceed the configured size cap."""

    def __init__(self, message: str, size: int | None = None):
        super().__init__(message)
        self.size = size


class PresentationError(SelfSimError):
    """Presentation text violates the file grammar or its closure rules."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class UnknownGroupError(SelfSimError):
    """Requested catalog key does not exist."""


class NotTransitiveError(SelfSimError):
    """The group action on the requested level has more than one orbit."""

    def __init__(self, message: str, orbit_size: int):
        super().__init__(message)
        self.orbit_size = orbit_size


class IntegrityError(SelfSimError):
    """An internal consistency check failed; indicates a bug upstream of the caller."""


class NumericalError(SelfSimError):
    """A floating-point step failed to resolve within its tolerance."""
