"""Exception types raised by the library."""


class FbmacError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(FbmacError, ValueError):
    pass


class InvalidParams(FbmacError, ValueError):
    """Scheme parameters violate a structural requirement (e.g. causality)."""


class NotPositiveDefinite(FbmacError, ValueError):
    pass


class DegenerateNoiseCov(FbmacError, ValueError):
    pass


class DegenerateConditioning(FbmacError, ValueError):
    """A conditioning covariance in the innovation recursion is singular."""


class RhoAboveRhoStar(FbmacError, ValueError):
    pass


class Condrho1Violated(FbmacError, ValueError):
    pass


class SymmetryViolated(FbmacError, ValueError):
    pass


class PowerSplitInfeasible(FbmacError, ValueError):
    pass


class UnknownCheck(FbmacError, KeyError):
    pass
