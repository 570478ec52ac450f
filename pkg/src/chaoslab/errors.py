"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when an argument fails a documented precondition."""


class BudgetExceededError(RuntimeError):
    """Raised when an enumeration or search would exceed its node budget."""

    def __init__(self, message, spent=None, budget=None):
        super().__init__(message)
        self.spent = spent
        self.budget = budget


class NonConvergenceError(RuntimeError):
    """Raised when an iterative numerical routine fails to converge.

    Carries the residual reached when the iteration stopped so callers can
    decide whether the partial answer is still usable.
    """

    def __init__(self, message, residual=float("inf")):
        super().__init__(message)
        self.residual = residual
