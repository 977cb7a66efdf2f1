"""Exception hierarchy shared by all modules.

Each class carries an ``exit_code`` used by the command line front end:
precondition failures map to 3, internal inconsistencies to 4.
"""


class SepPairsError(Exception):
    exit_code = 1


class PreconditionFailed(SepPairsError, ValueError):
    exit_code = 3


class ShapeMismatch(PreconditionFailed):
    pass


class NotSeparated(PreconditionFailed):
    pass


class NotAProjection(PreconditionFailed):
    pass


class NotIdempotent(PreconditionFailed):
    pass


class NotAnnihilating(PreconditionFailed):
    pass


class NormNotLessThanOne(PreconditionFailed):
    pass


class LambdaZero(PreconditionFailed):
    pass


class NotAState(PreconditionFailed):
    pass


class X0InL(PreconditionFailed):
    pass


class InternalInconsistency(SepPairsError, ArithmeticError):
    """Two routes to the same verdict disagreed beyond tolerance slack."""

    exit_code = 4
