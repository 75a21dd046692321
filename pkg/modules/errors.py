class DimensionMismatchError(ValueError):
    pass


class SegmentCapError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class PointSetParseError(ValueError):
    """Raised for malformed point-set input; `line` is 1-based (0 = whole input)."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class BudgetExceededError(RuntimeError):
    def __init__(self, candidates: int, budget: int):
        self.candidates = candidates
        self.budget = budget
        super().__init__(
            f"oracle refused: {candidates:,} candidate subsets exceed the budget of {budget:,}"
        )


class RearrangeInvariantError(AssertionError):
    pass
