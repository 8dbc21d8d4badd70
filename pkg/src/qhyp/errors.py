"""Exception hierarchy.

Every domain failure derives from :class:`QHypError`; the CLI maps these to
exit code 1 and anything else to a crash.
"""


class QHypError(Exception):
    """Base class for domain errors."""

    code = "QHypError"

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class ZeroQuaternion(QHypError, ZeroDivisionError):
    pass


class ZeroVector(QHypError):
    pass


class PositiveVector(QHypError):
    """Vector with <z,z> > 0, i.e. outside the closed ball."""


class BoundaryPoint(QHypError):
    pass


class DimensionMismatch(QHypError, ValueError):
    pass


class NotSymplectic(QHypError):
    def __init__(self, residual, message=None):
        self.residual = float(residual)
        super().__init__(message or f"matrix does not preserve the form (residual {self.residual:.3e})")

    def to_dict(self):
        d = super().to_dict()
        d["residual"] = self.residual
        return d


class NearIdentity(QHypError):
    pass


class NotLoxodromic(QHypError):
    pass


class DegenerateConfiguration(QHypError):
    pass


class ADZero(DegenerateConfiguration):
    pass


class MgTooLarge(QHypError):
    def __init__(self, mg, limit):
        self.mg = float(mg)
        self.limit = float(limit)
        super().__init__(f"M_g = {self.mg:.10g} is not below {self.limit:.10g}")

    def to_dict(self):
        d = super().to_dict()
        d.update(mg=self.mg, limit=self.limit)
        return d


class NotDiagonalPosition(QHypError):
    pass


class InsufficientIterations(QHypError):
    pass


class CoincidentEndpoints(QHypError):
    pass


class BelowThreshold(QHypError):
    pass


class ConditionFailed(QHypError):
    def __init__(self, value, message=None):
        self.value = float(value)
        super().__init__(message or f"condition failed (value {self.value:.10g})")

    def to_dict(self):
        d = super().to_dict()
        d["value"] = self.value
        return d


class InternalError(QHypError, RuntimeError):
    """A guaranteed mathematical fact failed numerically; indicates a bug."""
