"""Exception hierarchy for fracplanar."""


class FracPlanarError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FracPlanarError, ValueError):
    """Invalid system definition or system-spec document."""


class OrdersOutOfRange(ValidationError):
    pass


class EqualOrdersWithoutFlag(ValidationError):
    pass


class NonlinearityViolatesLipschitzAtZero(ValidationError):
    pass


class DegenerateOrders(FracPlanarError, ValueError):
    """Equal orders reached an operation that needs alpha1 != alpha2."""


class NonpositiveC(FracPlanarError, ValueError):
    """det A <= 0 where a positive constant term is required."""


class ZeroOnContour(FracPlanarError):
    pass


class BudgetExhausted(FracPlanarError):
    pass


class ContourInvalid(FracPlanarError):
    """No admissible Hankel contour could be found for the kernel quadrature."""


class QuadratureNotConverged(FracPlanarError):
    pass


class NewtonDiverged(FracPlanarError):
    pass


class BlowUp(FracPlanarError):
    """State magnitude crossed the blow-up threshold.

    The partial trajectory computed so far is attached as ``trajectory``.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


# the overflow diagnostic of the stepper is the blow-up error
Overflow = BlowUp


class NotContractive(FracPlanarError):
    pass


class WindowTooShort(FracPlanarError, ValueError):
    pass


class NoContractiveRadius(FracPlanarError):
    pass
