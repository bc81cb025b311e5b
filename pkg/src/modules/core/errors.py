"""
Error Types
Exception hierarchy shared by every tickbound module
"""

from typing import Optional


class TickboundError(Exception):
    """Base class for all tickbound errors"""


class NonHermitianError(TickboundError, ValueError):
    """Operator or state violates the Hermiticity tolerance"""


class DimensionMismatchError(TickboundError, ValueError):
    """Operators of incompatible shapes were combined"""


class InvalidStateError(TickboundError, ValueError):
    """Density matrix is not positive, not normalizable or has an invalid trace"""


class StepUnderflowError(TickboundError, RuntimeError):
    """Integrator step size collapsed below floating-point resolution"""


class NotConvergedError(TickboundError, RuntimeError):
    """Survival never dropped below the cutoff, so tick statistics are undefined"""

    def __init__(self, message: str, tick_index: Optional[int] = None, horizon: Optional[float] = None):
        super().__init__(message)
        self.tick_index = tick_index
        self.horizon = horizon


class NonPositiveVarianceError(TickboundError, ArithmeticError):
    """Quadrature produced sigma^2 <= 0"""


class TimeOutOfRangeError(TickboundError, ValueError):
    """Requested time lies outside the integrated window"""


class SurvivalUnderflowError(TickboundError, ArithmeticError):
    """Survival too small to renormalize the conditioned state"""


class NoCrossingError(TickboundError, LookupError):
    """Survival never crosses the matched Heaviside survival after t0"""

    def __init__(self, message: str, t0: Optional[float] = None):
        super().__init__(message)
        self.t0 = t0


class MultipleCrossingsError(TickboundError, RuntimeError):
    """More than one crossing after t0"""

    def __init__(self, message: str, crossings: Optional[list] = None):
        super().__init__(message)
        self.crossings = crossings or []


class MuBelowFloorError(TickboundError, ValueError):
    """Mean tick time below 1/Gamma"""


class EnsembleRejectionError(TickboundError, RuntimeError):
    """Random model builder exhausted its resampling budget"""


class SchemaVersionUnsupportedError(TickboundError, ValueError):
    """Document carries an unknown schema_version"""


class MalformedDocumentError(TickboundError, ValueError):
    """Document is structurally invalid"""


class InsufficientSamplesError(TickboundError, ValueError):
    """Too few uncensored trajectory samples for an estimate"""


class UnsupportedMomentError(TickboundError, ValueError):
    """Moment order outside the supported range"""
