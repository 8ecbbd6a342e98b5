"""Exception hierarchy.

Every error is a ``ValueError`` so callers that only care about bad input can
catch one class.
"""


class CoreCommitteeError(ValueError):
    """Base class for all errors raised by this package."""


class InvalidInstance(CoreCommitteeError):
    """An instance, committee or utility vector violates its invariants."""


class InvalidProfile(CoreCommitteeError):
    """An approval profile is malformed."""


class UnsupportedError(CoreCommitteeError):
    """The input lies outside the range an algorithm is guaranteed for."""


class PreconditionError(CoreCommitteeError):
    """A documented precondition of an operation does not hold."""


class InfeasibleStartError(PreconditionError):
    """The starting utility vector is not fractionally feasible."""


class InconsistencyError(CoreCommitteeError):
    """A committee asks for more candidates of a type than exist."""


class InvariantViolation(CoreCommitteeError):
    """An internal invariant failed. This always indicates a bug."""


class ConvergenceError(CoreCommitteeError):
    """The fractional core optimizer did not produce a certified point.

    The best blocking certificate seen is kept in ``certificate``.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class ResourceLimitError(CoreCommitteeError):
    """An enumeration exceeded its configured cap.

    ``partial`` holds whatever results were collected before stopping.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial if partial is not None else []
