"""Exception hierarchy shared by all modules."""


class LpHeatError(Exception):
    pass


class DomainError(LpHeatError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UsageError(LpHeatError, ValueError):
    """Malformed request, e.g. a zero Monte Carlo budget or an empty sample."""


class ConvergenceError(LpHeatError, ArithmeticError):
    """A numerical routine stopped before meeting its tolerance.

    ``estimate`` and ``err`` carry the best value reached so that callers can
    decide whether it is still usable.
    """

    def __init__(self, message, estimate=float("nan"), err=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.err = err
