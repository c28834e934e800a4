"""Exception hierarchy shared by all modules."""


class RoughsioError(Exception):
    """Base class for every error raised by the package."""


class DomainError(RoughsioError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularPoint(RoughsioError, ValueError):
    """A kernel was evaluated exactly on one of its singularities."""


class QuadratureFailure(RoughsioError, ArithmeticError):
    """Adaptive refinement could not reach the requested tolerance."""


class DivergentMoment(RoughsioError, ArithmeticError):
    """A moment integral exceeded the configured overflow cap."""


class Overflow(RoughsioError, ArithmeticError):
    """A condition integral exceeded the configured overflow cap."""


class CalibrationError(RoughsioError, ValueError):
    """A bump amplitude does not cancel the symbol at the origin."""


class GridTooCoarse(RoughsioError, ArithmeticError):
    """Refining a frequency grid moved a supremum by more than the tolerance."""


class ResolutionError(RoughsioError, ValueError):
    """A truncation radius is below the grid spacing."""
