"""
Exception hierarchy for peakkit

Every error raised by the toolkit derives from PeakKitError. The four
families map onto CLI exit codes:

- InputError, PreconditionError  -> exit 2
- NumericError                   -> exit 3
- DomainViolation                -> evaluation failure (a verification Fail)

Author: peakkit developers
"""


class PeakKitError(Exception):
    """Base exception for peakkit errors"""
    pass


# Input ---------------------------------------------------------------------

class InputError(PeakKitError):
    """Raised when user-supplied input cannot be interpreted"""
    pass


class SpecValidationError(InputError):
    """Raised when a domain/map/report JSON document fails schema validation"""

    def __init__(self, message: str, field_path: str = ""):
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)


# Preconditions -------------------------------------------------------------

class PreconditionError(PeakKitError):
    """Raised when an operation is called outside its documented precondition"""
    pass


class NotInClosure(PreconditionError):
    """Raised when a point does not lie in the closure of the set"""
    pass


class NotInSet(PreconditionError):
    """Raised when a point to decompose is not in the polyhedron"""
    pass


class NotExtreme(PreconditionError):
    """Raised when a construction needs an extreme point and gets another"""
    pass


class NotOnBoundary(PreconditionError):
    """Raised when a point expected on the boundary is interior or exterior"""
    pass


class ScopeViolation(PreconditionError):
    """Raised when an input lies outside the supported scope of an operation"""
    pass


class NotPseudoconvex(PreconditionError):
    """Raised when the union of log pieces is not log-convex"""
    pass


class IndistinctPoints(PreconditionError):
    """Raised when fiber points coincide within tolerance"""
    pass


class FiberBoundaryMismatch(PreconditionError):
    """Raised when g(b) does not classify Boundary during a transfer"""
    pass


# Evaluation ----------------------------------------------------------------

class DomainViolation(PeakKitError):
    """Raised when a function is evaluated outside its declared domain"""

    def __init__(self, message: str, row: int = -1):
        self.row = row
        if row >= 0:
            message = f"{message} (sample row {row})"
        super().__init__(message)


class BranchViolation(DomainViolation):
    """Raised when an ExpInvLog argument leaves the open left half-plane"""
    pass


class PoleHit(DomainViolation):
    """Raised when a fractional map denominator n + lambda*z1 vanishes"""
    pass


class AxisPoint(DomainViolation):
    """Raised when the log map meets a vanishing coordinate"""
    pass


# Numerics ------------------------------------------------------------------

class NumericError(PeakKitError):
    """Base class for numerical failures"""
    pass


class NonConvergence(NumericError):
    """Raised when the simultaneous root iteration exhausts max_iterations"""
    pass


class SearchFailure(NumericError):
    """Raised when no lambda reaches the boundary band"""
    pass


class ExponentSearchFailure(NumericError):
    """Raised when a Bishop exponent exceeds its doubling cap"""
    pass


class RecursionBudgetExceeded(NumericError):
    """Raised when the Laurent M-doubling loop exceeds its cap"""
    pass
