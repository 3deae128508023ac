"""Exception and warning classes raised by pgarch."""


class PGarchError(Exception):
    """Base class for all pgarch errors."""


class SpecError(PGarchError, ValueError):
    """A model specification violates a structural constraint."""


class NonPositiveIntercept(SpecError):
    pass


class NegativeCoefficient(SpecError):
    pass


class BadDimensions(SpecError):
    pass


class NonFiniteValue(SpecError):
    pass


class SizeOverflow(PGarchError, ValueError):
    """A constructed matrix would exceed the configured dimension cap."""


class ShapeMismatch(PGarchError, ValueError):
    pass


class SpectralRadiusAtLeastOne(PGarchError, ArithmeticError):
    """Raised when a Neumann-type inverse is requested for a matrix with rho >= 1.

    Upstream this means the moment being computed does not exist.
    """


class NotStationary(SpectralRadiusAtLeastOne):
    pass


class SingularSystem(PGarchError, ArithmeticError):
    pass


class MomentDoesNotExist(PGarchError, ArithmeticError):
    """An innovation moment needed by the computation is infinite."""


class NotGarch11(PGarchError, ValueError):
    pass


class QuadratureFailure(PGarchError, ArithmeticError):
    pass


class InnovationNotAbsolutelyContinuous(PGarchError, ValueError):
    pass


class TooShort(PGarchError, ValueError):
    pass


class NumericOverflow(PGarchError, OverflowError):
    """The simulated volatility left the representable range.

    Attributes
    ----------
    year : int
        Year index relative to the first recorded year; negative during burn-in.
    season : int
        Season in 1..s.
    """

    def __init__(self, msg, year, season):
        super().__init__(msg)
        self.year = year
        self.season = season


class ConvergenceWarning(UserWarning):
    pass
