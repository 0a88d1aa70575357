"""Exception and warning types raised across the package."""


class CqesError(Exception):
    """Base class for all library errors."""


class NonPositiveZeta(CqesError, ValueError):
    pass


class NotDoubleWell(CqesError, ValueError):
    pass


class NotCQES(CqesError, ValueError):
    """kappa is not an integer of the parity required by the irrep."""


class NoSplit(CqesError, ValueError):
    pass


class DimensionTooSmall(CqesError, ValueError):
    pass


class BlockTooLarge(CqesError, ValueError):
    pass


class DegenerateBlock(CqesError, ArithmeticError):
    pass


class AnalyticMismatch(CqesError, ArithmeticError):
    """Two independent analytic routes disagree."""


class HyperbolicDivergence(CqesError, ValueError):
    pass


class HyperbolicNotSupported(CqesError, ValueError):
    pass


class BoxTooSmall(CqesError, ArithmeticError):
    pass


class MismatchedParams(CqesError, ValueError):
    pass


class Indeterminate(CqesError, ArithmeticError):
    pass


class NotConverged(CqesError, ArithmeticError):
    pass


class PotentialOverflowWarning(RuntimeWarning):
    pass
