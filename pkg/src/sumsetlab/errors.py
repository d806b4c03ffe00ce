"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: ``InputError`` -> 3,
``CoverageError`` / ``PolyOverflowError`` -> 4.
"""


class LabError(Exception):
    """Base class for all sumsetlab errors."""


class InputError(LabError, ValueError):
    """Bad parameters: malformed specs, violated preconditions."""


class PreconditionError(InputError):
    """A mathematical hypothesis required by an operation does not hold."""


class FormatError(InputError):
    """Malformed or truncated serialized data."""


class CoverageError(LabError):
    """A window does not cover the integers an operation needs."""


class OutOfWindowError(CoverageError, IndexError):
    """Membership query outside ``[lo, hi)``."""


class PolyOverflowError(LabError, OverflowError):
    """Polynomial value (or a derived index) left the supported range."""
