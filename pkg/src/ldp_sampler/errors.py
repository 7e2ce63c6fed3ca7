"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class ContractError(RuntimeError):
    """A caller-supplied object broke an operational contract (e.g. a
    bisection bracket whose endpoint masses do not straddle 1)."""


class NonConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap.

    Carries the last bracket examined so the caller can diagnose whether
    the input violated a monotonicity assumption.
    """

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(f"{message} (last bracket: [{bracket[0]!r}, {bracket[1]!r}])")
        self.bracket = bracket


class NumericError(ArithmeticError):
    """A numerical routine produced an untrustworthy result.

    Attributes, when applicable:
      estimate: the value achieved before the failure was detected
      residual: the error indicator that exceeded tolerance
      abscissa: the offending evaluation point, for non-finite integrands
    """

    def __init__(self, message: str, *, estimate=None, residual=None, abscissa=None):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual
        self.abscissa = abscissa


class MechanismError(RuntimeError):
    """A sampling mechanism failed internally; indicates a broken
    precondition rather than an expected runtime condition."""
