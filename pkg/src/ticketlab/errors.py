"""Exception types shared across the package.

The CLI maps these onto process exit codes: UsageError -> 1,
DataFormatError -> 2, NumericalError -> 3.
"""


class TicketLabError(Exception):
    """Base class for all package errors."""


class UsageError(TicketLabError):
    """Caller violated a precondition (bad argument, empty input, bad config)."""


class ShapeError(UsageError):
    """Array shapes do not chain or do not match their partner structure."""


class DataFormatError(TicketLabError):
    """A file on disk is malformed: bad magic, truncation, version mismatch."""


class NumericalError(TicketLabError):
    """Training produced non-finite weights; the experiment cannot continue."""
