class PreconditionError(ValueError):
    """An operation was called on input outside its domain."""


class BudgetExceeded(RuntimeError):
    """A bounded enumeration ran past its budget before finishing."""

    def __init__(self, limit: int, message: str = ""):
        self.limit = limit
        super().__init__(message or f"budget of {limit} exhausted")


class Budget:
    """Shared step counter for bounded searches.

    ``spend`` raises :class:`BudgetExceeded` on the step that would exceed
    ``limit``; ``used`` never exceeds ``limit``.
    """

    def __init__(self, limit: int | None):
        if limit is not None and limit <= 0:
            raise ValueError("budget must be positive")
        self.limit = limit
        self.used = 0

    def spend(self, k: int = 1) -> None:
        if self.limit is not None and self.used + k > self.limit:
            self.used = self.limit
            raise BudgetExceeded(self.limit)
        self.used += k

    @classmethod
    def coerce(cls, budget: "int | Budget | None") -> "Budget":
        if isinstance(budget, Budget):
            return budget
        return cls(budget)
