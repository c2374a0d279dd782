"""Exception types raised across the package."""


class HolonomyError(Exception):
    """Base class for all package errors."""


class NotHermitian(HolonomyError, ValueError):
    pass


class NotUnitary(HolonomyError, ValueError):
    pass


class RankDeficient(HolonomyError, ValueError):
    pass


class InsufficientComplement(HolonomyError, ValueError):
    """Not enough independent directions orthogonal to a frame."""


class InvalidFrame(HolonomyError, ValueError):
    pass


class NotOrthogonal(HolonomyError, ValueError):
    pass


class MeshTooCoarse(HolonomyError, ValueError):
    """Consecutive projector samples too far apart for a discrete lift."""


class NotClosed(HolonomyError, ValueError):
    pass
