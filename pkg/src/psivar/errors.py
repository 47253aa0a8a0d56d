"""Exception types shared across the package.

ParameterError covers bad arguments and range violations (CLI exit 2);
ResourceError covers memory / combinatorial budget refusals (CLI exit 3).
"""


class PsivarError(Exception):
    pass


class ParameterError(PsivarError, ValueError):
    """Invalid argument, precondition violation, or out-of-range request."""


class RangeError(ParameterError):
    """Request exceeds the certified range of a table or spectrum."""


class FormatError(ParameterError):
    """Malformed input file."""


class ResourceError(PsivarError, RuntimeError):
    """Work refused because it exceeds a memory or combinatorial budget."""


class InsufficientTableError(ParameterError):
    """A coefficient table is too short to certify a requested truncation."""
