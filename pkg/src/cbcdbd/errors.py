"""Exception types shared across the package."""


class WeightSpecError(ValueError):
    """Raised when a weight specification is malformed or incomplete."""


class EnumerationBudgetError(RuntimeError):
    """Raised when an exact enumeration would exceed its configured budget."""


class SmoothnessError(ValueError):
    """Raised when a smoothness order has no supported closed form."""
