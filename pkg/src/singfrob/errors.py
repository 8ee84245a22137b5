"""Exception hierarchy shared across the package.

Three failure families matter to callers (and map onto CLI exit codes):
input/validation problems, violated mathematical preconditions, and
series truncation running out before a requested order.
"""


class InputSpecError(Exception):
    """A problem description (file, polynomial text, option value) is malformed."""


class PolyParseError(InputSpecError):
    """Polynomial text could not be parsed; carries a position when known."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class PreconditionError(Exception):
    """A mathematical precondition fails: non-quasihomogeneous input,
    non-isolated critical point, a basis that is not good, a point where
    the multiplication is not semisimple, and so on."""


class TruncationExhaustedError(Exception):
    """A computation needs series data beyond the configured truncation order."""
