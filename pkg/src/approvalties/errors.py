"""Exception types shared across the package."""


class ApprovaltiesError(Exception):
    """Base class for all domain errors raised by this package."""


class ElectionFormatError(ApprovaltiesError):
    """Malformed election or graph file.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class WeightFunctionError(ApprovaltiesError):
    """Increment list violates the 1-concavity contract."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class UnfillableCommitteeError(ApprovaltiesError):
    """A sequential rule cannot fill the requested number of seats."""


class LimitExceededError(ApprovaltiesError):
    """A count or enumeration exceeded its caller-supplied limit.

    ``at_least`` is a verified lower bound on the true count; ``exact``
    is True when the bound is in fact the exact count.
    """

    def __init__(self, at_least, limit, exact=False):
        word = "is" if exact else "is at least"
        super().__init__(f"winning-committee count {word} {at_least}, exceeding limit {limit}")
        self.at_least = at_least
        self.limit = limit
        self.exact = exact


class ConservationError(ApprovaltiesError):
    """Exact money accounting of a budget-based rule was violated.

    Raised only on internal inconsistency; any occurrence is a bug.
    """
