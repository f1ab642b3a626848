class ToruslabError(Exception):
    """Base class for all library errors."""


class InputError(ToruslabError, ValueError):
    """An argument violates an operation's precondition."""


class UndefinedQuantityError(ToruslabError):
    """The requested quantity does not exist for this input (e.g. the growth
    exponent of a constant map)."""


class NumericalError(ToruslabError, ArithmeticError):
    """A computation produced a non-finite value or failed to converge."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage
