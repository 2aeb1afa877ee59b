"""Exception types raised across the package."""


class TSSQError(Exception):
    """Base class for all library errors."""


class DomainError(TSSQError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class NonConvergence(TSSQError):
    """Newton iteration for the complex root did not converge."""


class MaxDepthExceeded(TSSQError):
    """Adaptive panel bisection exceeded its depth budget."""


class RecurrenceUnstable(TSSQError):
    """Forward recurrence would amplify rounding beyond the allowed budget."""


class ShiftTooCloseToNode(TSSQError):
    """The expansion centre sits too close to a grid node for the fast path."""


class OracleNotConverged(TSSQError):
    """The reference integrator could not certify its result."""


class RejectionBudgetExceeded(TSSQError):
    """Target sampling rejected too many candidate points."""
