"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class AnglePersistError(Exception):
    """Base class for all package errors."""


class FieldMismatchError(AnglePersistError, TypeError):
    """Operands live over different coefficient fields."""


class ComplexValidationError(AnglePersistError, ValueError):
    """Input complex or map violates a structural invariant.

    ``cell`` names the offending simplex or oriented edge when there is one.
    """

    def __init__(self, message: str, cell=None):
        super().__init__(message)
        self.cell = cell


class ParseError(ComplexValidationError):
    pass


class FaceClosureError(ComplexValidationError):
    pass


class CocycleError(ComplexValidationError):
    pass


class DiameterError(ComplexValidationError):
    pass


class NotACycleError(AnglePersistError, ValueError):
    pass


class InsufficientMarginError(AnglePersistError, ValueError):
    """A level query sits too close to the edge of a finite window."""


class InstabilityError(AnglePersistError, RuntimeError):
    """Box ranks at epsilon and epsilon/2 disagree; the window is too small."""


class NonTerminationError(AnglePersistError, RuntimeError):
    """Window growth hit the period cap before the certificate held."""


class CertificateError(AnglePersistError, RuntimeError):
    """A module-refinement certificate failed."""
