"""Shared exception types.

The CLI maps these onto exit codes: SpecParseError and argparse failures
exit 2, PreconditionError exits 3, TheoremViolation exits 4.
"""


class SpecParseError(ValueError):
    """A function-spec string (or report payload) failed to parse."""


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class TheoremViolation(AssertionError):
    """A proved inequality failed numerically.

    This never indicates bad input; it means the implementation is wrong,
    so it is an AssertionError rather than a ValueError.
    """
