"""Exception types shared across the package."""


class MonoreachError(Exception):
    pass


class InvalidParameterError(MonoreachError, ValueError):
    """An argument violates an operation's precondition."""


class InvalidReferenceError(MonoreachError, ValueError):
    """A wire id does not exist (or would create a forward reference)."""


class BudgetExceededError(MonoreachError):
    """An exact enumeration would exceed its configured cost budget."""


class FamilyViolationError(MonoreachError):
    """A set family failed its covering condition.

    Carries the witnessing element subset and the indices of the sets that
    avoid it, so callers can surface the counterexample.
    """

    def __init__(self, message, block=None, set_indices=None):
        super().__init__(message)
        self.block = tuple(block) if block is not None else None
        self.set_indices = tuple(set_indices) if set_indices is not None else None


class ConstructionFailedError(MonoreachError):
    """A randomized construction exhausted its attempt budget."""

    def __init__(self, message, last_counterexample=None):
        super().__init__(message)
        self.last_counterexample = last_counterexample
