"""Exception hierarchy shared by all modules."""


class LevySinhError(Exception):
    """Base class. ``exit_code`` is used by the CLI."""

    exit_code = 3


class ParameterError(LevySinhError, ValueError):
    exit_code = 2


class DomainError(LevySinhError, ValueError):
    """Argument on or beyond a branch cut, or outside the admissible set."""

    exit_code = 2


class CutError(DomainError):
    pass


class Unsupported(LevySinhError):
    exit_code = 2


class Infeasible(LevySinhError):
    """No admissible contour / parameters for the requested computation."""


class StripConflict(Infeasible):
    pass


class NonConvergence(LevySinhError):
    pass


class ZeroCrossing(LevySinhError):
    pass


class PrecisionLoss(LevySinhError):
    pass


class NumericalError(LevySinhError):
    """NaN or overflow in a quadrature sum; carries the offending node."""

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class SymmetryViolation(LevySinhError):
    def __init__(self, msg, defect=None):
        super().__init__(msg)
        self.defect = defect


class EmptyIntersection(LevySinhError):
    exit_code = 2


class Inconclusive(LevySinhError):
    """A numerical test came too close to a singular configuration to decide."""
