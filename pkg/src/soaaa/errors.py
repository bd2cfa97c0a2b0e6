"""Exception hierarchy shared by all modules."""


class SoaaaError(Exception):
    """Base class for all errors raised by this package."""


class PoleHit(SoaaaError, ArithmeticError):
    """A barycentric model was evaluated at one of its poles."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class DivisionByZeroError(SoaaaError, ZeroDivisionError):
    """A Loewner-type matrix needed a sample point equal to a (quasi-)support point."""


class DomainError(SoaaaError, ValueError):
    """Input outside the domain an operation is defined on."""


class ShapeMismatch(SoaaaError, ValueError):
    pass


class NonFiniteInput(SoaaaError, ValueError):
    pass


class NonFiniteResidual(SoaaaError, ArithmeticError):
    """The residual of a nonlinear least-squares problem is not finite."""


class EmptyDataSet(SoaaaError, ValueError):
    pass


class InsufficientData(SoaaaError, ValueError):
    pass


class InvalidRange(SoaaaError, ValueError):
    pass


class SingularShift(SoaaaError, ArithmeticError):
    """The shifted pencil of a realization is singular (evaluation at a pole)."""


class EmptyInput(SoaaaError, ValueError):
    pass
