"""Exception hierarchy shared by every module."""


class SecureRepairError(Exception):
    """Base class for all errors raised by this package."""


class FieldMismatchError(SecureRepairError, TypeError):
    """Operands live in different prime fields."""


class NotInvertibleError(SecureRepairError, ZeroDivisionError):
    pass


class NoSolution(SecureRepairError):
    """A linear system has no solution."""


class ParameterError(SecureRepairError, ValueError):
    """Arguments violate a documented precondition."""


class DecodeError(SecureRepairError):
    pass


class TooFewShares(DecodeError):
    pass


class InconsistentShares(DecodeError):
    """The supplied shares are not a codeword of the scheme."""


class NoRepairFunction(SecureRepairError):
    """No linear function of the helper coordinates yields the lost share."""


class InvalidPlan(SecureRepairError):
    pass


class UnrepairableError(SecureRepairError):
    pass


class BudgetExceeded(SecureRepairError):
    def __init__(self, required: int, budget: int):
        super().__init__(
            f"exhaustive enumeration needs {required} outcomes, budget is {budget}"
        )
        self.required = required
        self.budget = budget


class NotApplicable(SecureRepairError):
    """A bound is requested outside the regime where it is claimed."""
