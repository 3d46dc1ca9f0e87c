"""Exception types raised by the library."""


class UsageError(ValueError):
    """Caller passed arguments that violate an operation's preconditions."""


class CapacityError(UsageError):
    """An exhaustive enumeration was requested over too large a space."""


class ActionError(RuntimeError):
    """A generator produced a point that does not live in the ambient space."""


class DegenerateQuotientError(RuntimeError):
    """No samples survived the stability filtering of a quotient run."""
