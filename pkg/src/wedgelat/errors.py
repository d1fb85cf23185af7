"""Exception hierarchy.

Every error carries the CLI exit code of its family:

    2  mathematical obstruction (the answer is "no lift exists here")
    3  invalid input
    4  resource bound hit
    5  internal invariant violation (always a bug)
"""


class WedgeLatError(Exception):
    exit_code = 1


class InvalidInput(WedgeLatError):
    exit_code = 3


class Obstruction(WedgeLatError):
    exit_code = 2


class ResourceBound(WedgeLatError):
    exit_code = 4


class InvariantViolation(WedgeLatError):
    exit_code = 5


class ZeroInput(InvalidInput):
    pass


class NonUnitClass(InvalidInput):
    pass


class SingularInput(InvalidInput):
    pass


class IsotropicVector(InvalidInput):
    pass


class NotAnIsometry(InvalidInput):
    pass


class NotAdmissible(InvalidInput):
    pass


class NotEllIntegral(InvalidInput):
    pass


class EllIsTwo(InvalidInput):
    pass


class WittMismatch(InvalidInput):
    pass


class NoAnticommutation(InvalidInput):
    pass


class PrecisionLoss(InvalidInput):
    """Division by p below precision 1."""


class ObstructionAtEll(Obstruction):
    def __init__(self, message, square_class=None):
        super().__init__(message)
        self.square_class = square_class


class WittObstruction(Obstruction):
    def __init__(self, message, residue_class=None):
        super().__init__(message)
        self.residue_class = residue_class


class SearchExhausted(ResourceBound):
    pass


class ProportionalityFailure(InvariantViolation):
    pass


class GaloisTestFailure(InvariantViolation):
    pass
