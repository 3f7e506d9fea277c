"""Exception types shared across the package."""


class EhkError(Exception):
    """Base class for all package errors."""


class LimitExceeded(EhkError):
    """An exact routine was asked to run beyond its configured size limit."""


class BudgetExceeded(EhkError):
    """An enumeration ran out of budget.

    ``partial`` carries whatever was collected before the budget ran out.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class EmptyIntersection(EhkError):
    pass


class NotAClique(EhkError):
    pass


class NotStable(EhkError):
    pass


class NoAttachment(EhkError):
    pass


class InvalidParams(EhkError):
    pass


class ParseError(EhkError):
    pass


class PreconditionFailed(EhkError):
    pass


class PostconditionFailed(EhkError):
    """A verified postcondition did not hold; ``diagnostics`` explains why."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NotABreaker(EhkError):
    pass


class HubPrecondition(EhkError):
    pass


class NotCooperative(EhkError):
    pass


class NotMinimalSeparator(EhkError):
    pass


class CliqueTooLarge(EhkError):
    pass


class BisimplicialMissing(EhkError):
    pass


class Adjacent(EhkError):
    pass


class InvalidDecomposition(EhkError):
    pass
