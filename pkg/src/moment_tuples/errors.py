"""Exception types shared across the package.

Plain ``ValueError`` is used for ordinary argument validation; the classes
here exist so callers (and the CLI exit-code mapping) can distinguish inputs
that are structurally fine but geometrically unusable.
"""


class DegenerateInputError(ValueError):
    """Input is syntactically valid but geometrically degenerate.

    Examples: a cloud with zero total weight, an image where no pixel
    passes the threshold, a cloud collapsed onto the origin.
    """


class AmbiguityError(RuntimeError):
    """The requested quantity is not observable from the given data.

    Raised when a tuple set is rank-deficient, which happens for
    symmetric objects: any rotation about the symmetry axis explains the
    data equally well.
    """


class StateError(RuntimeError):
    """An operation was called on a report in the wrong classification state."""


class TupleFileError(ValueError):
    """A tuple-definition file is malformed or inconsistent with its basis."""
