"""Exception hierarchy shared by all modules."""


class HermiteQuadError(Exception):
    """Base class for errors raised by hermite_quad."""


class ValidationError(HermiteQuadError, ValueError):
    """Invalid argument, configuration or dimension mismatch."""


class ConvergenceError(HermiteQuadError, ArithmeticError):
    """A numerical procedure failed to reach its stated accuracy."""


class CertificationError(ConvergenceError):
    """A constructed rule failed its a-posteriori error certificate."""


class BudgetError(HermiteQuadError):
    """Search budget exhausted before a feasible rule was found.

    Attributes
    ----------
    best : object
        Best candidate found before the budget ran out.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
