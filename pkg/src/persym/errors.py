"""Exception types shared across the package."""

from __future__ import annotations


class StructuralError(ValueError):
    """Input has the wrong shape: bad bit length, incomplete census, mismatched (n, k)."""


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed its configured budget.

    ``cost`` is the number of units (tuples, assignments or linear solves) the
    request would have needed; ``budget`` is the configured ceiling.
    """

    def __init__(self, what: str, cost: int, budget: int, strategy: str | None = None):
        self.what = what
        self.cost = cost
        self.budget = budget
        self.strategy = strategy
        label = f" ({strategy})" if strategy else ""
        super().__init__(
            f"{what}{label}: {cost} units requested, budget is {budget} "
            f"(~2^{cost.bit_length() - 1}); raise the budget explicitly to run it"
        )


class NoClosedForm(LookupError):
    """No closed form is available for the requested (i, k)."""


class ConsistencyError(ArithmeticError):
    """A formula table produced a value that cannot be right (non-integral, table conflict)."""
