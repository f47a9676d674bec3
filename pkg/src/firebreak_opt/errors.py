"""Exception hierarchy shared across the toolkit.

The CLI maps FormatError / ValidationError / ConfigurationError / PlacementError
to exit code 1 (bad inputs) and anything else to exit code 2 (runtime failure).
"""


class FirebreakOptError(Exception):
    """Base class for all toolkit errors."""


class FormatError(FirebreakOptError):
    """A file does not conform to its declared format."""


class ValidationError(FirebreakOptError):
    """Data is well-formed but semantically invalid."""


class ConfigurationError(FirebreakOptError):
    """A run configuration cannot be executed as given."""


class PlacementError(FirebreakOptError):
    """A firebreak block cannot be realized at the requested position."""


class IgnitionRejectedError(FirebreakOptError):
    """The requested ignition cell cannot start a fire (callers redraw)."""
