"""Exception types raised by the library."""


class InputShapeError(ValueError):
    """Input points have the wrong shape or mismatched dimension."""


class EmptyInputError(ValueError):
    """An operation received zero points."""


class InvalidLabelError(ValueError):
    """A label outside {-1, +1}."""


class InvalidCandidateError(ValueError):
    """A candidate regression function left the interval [-1, 1]."""


class InvalidRegularizationError(ValueError):
    pass


class InvalidHyperparameterError(ValueError):
    pass


class InvalidPermutationError(ValueError):
    pass


class NumericalError(ArithmeticError):
    """Factorization of a regularized Gram matrix failed."""
