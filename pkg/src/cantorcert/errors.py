"""Exception hierarchy shared by all modules."""


class CantorCertError(Exception):
    pass


class DomainError(CantorCertError, ValueError):
    """An operation was applied outside its domain (log of 0, 1/[0,1], ...)."""


class NumericOverflow(CantorCertError, OverflowError):
    pass


class RankCapExceeded(CantorCertError):
    pass


class BudgetExceeded(CantorCertError):
    pass


class ParseError(CantorCertError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.message = message


class NotDifferentiable(CantorCertError):
    pass


class ConditionLost(CantorCertError):
    """A descendant of a certified square no longer satisfies the criterion."""
