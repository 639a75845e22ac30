"""Error types raised by the numerical modules and translated by the services."""


class RTSurgeryError(Exception):
    """Base class for every error raised by rtsurgery"""


class CutViolationError(RTSurgeryError, ValueError):
    """An argument lies on the branch cut of Li2 or of the logarithm"""


class DomainError(RTSurgeryError, ValueError):
    """An argument lies outside the domain where an operation is defined"""


class IndexRangeError(RTSurgeryError, ValueError):
    """An integer index (color, Fourier index, order) is out of range"""


class ZeroFramingError(RTSurgeryError, ValueError):
    """Surgery coefficient q = 0 has a singular linking matrix"""


class ConvergenceError(RTSurgeryError, RuntimeError):
    """An iterative solver did not reach its tolerance"""


class DegenerateHessianError(RTSurgeryError, RuntimeError):
    """The Hessian determinant vanishes where a non-degenerate one is required"""


class IllConditionedFitError(RTSurgeryError, RuntimeError):
    """A least-squares fit is too ill-conditioned to be trusted"""

    def __init__(self, message: str, condition_number: float):
        super().__init__(message)
        self.condition_number = condition_number


class CacheError(RTSurgeryError, RuntimeError):
    """The invariant cache cannot be read or written"""
