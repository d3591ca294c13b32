"""Exception hierarchy shared by the exact and numeric layers."""


class ThetaPolyError(Exception):
    """Base class for all package errors."""


class DivisionByZero(ThetaPolyError, ZeroDivisionError):
    pass


class PoleAtPoint(ThetaPolyError, ZeroDivisionError):
    pass


class ArityMismatch(ThetaPolyError, ValueError):
    pass


class InvariantBreach(ThetaPolyError):
    """An internal consistency check failed; always indicates a bug."""


class InexactDivision(InvariantBreach):
    pass


class InconsistentSystem(InvariantBreach):
    pass


class SingularInterpolation(ThetaPolyError):
    pass


class PoleAtSpecialization(ThetaPolyError):
    pass


class NearSingularity(ThetaPolyError, ValueError):
    pass
