"""Exception hierarchy.

Every error raised on purpose by the package derives from ``TwistorError`` so
callers (the CLI in particular) can separate domain failures from bugs.
"""


class TwistorError(ValueError):
    """Base class for domain errors."""


class NotHermitian(TwistorError):
    pass


class DomainMismatch(TwistorError):
    """An operation defined for one scalar domain was given the other."""


class BadK(TwistorError):
    pass


class NotComplexStructure(TwistorError):
    pass


class NotCospherical(TwistorError):
    """The anticommutator of two complex structures is not a scalar matrix."""


class Proportional(TwistorError):
    pass


class Singular(TwistorError):
    pass


class OddRank(TwistorError):
    pass


class InvalidRep(TwistorError):
    pass


class OffQuadric(TwistorError):
    pass


class ConnectedLine(TwistorError):
    pass


class DegenerateImaginaryPart(TwistorError):
    pass


class OffCircle(TwistorError):
    pass


class ZeroParameter(TwistorError):
    pass


class BaseNotInLR(TwistorError):
    pass


class WrongEpsilon(TwistorError):
    pass


class StepTooLarge(TwistorError):
    pass


class OutOfReach(TwistorError):
    pass


class NotConverged(TwistorError):
    """Newton iteration failed; ``residual`` carries the last residual norm."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateBasis(TwistorError):
    """A subspace basis with zero or dependent columns."""


class DifferentComponents(TwistorError):
    """The two complex structures lie in different components of the period domain."""
