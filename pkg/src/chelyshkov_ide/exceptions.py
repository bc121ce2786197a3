"""Exception hierarchy."""


class ChelyshkovError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ChelyshkovError, ValueError):
    """An argument lies outside the domain of the operation."""


class CoefficientOverflow(ChelyshkovError, OverflowError):
    """An exact basis coefficient does not fit the 128-bit signed width."""


class RootFindingFailure(ChelyshkovError, RuntimeError):
    """Collocation node computation did not converge."""


class DimensionMismatch(ChelyshkovError, ValueError):
    pass


class NonFiniteValue(ChelyshkovError, FloatingPointError):
    """A problem function returned inf or nan."""


class SingularJacobian(ChelyshkovError, ArithmeticError):
    """The Newton linear system could not be solved.

    Attributes
    ----------
    condition : float
        Estimated 2-norm condition number of the Jacobian.
    """

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition


class NonConvergence(ChelyshkovError, RuntimeError):
    """Newton iteration stopped without meeting the tolerance.

    The best iterate is available as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class IllConditionedGram(ChelyshkovError, ArithmeticError):
    """A Gram determinant ratio is below the resolvable floor."""
