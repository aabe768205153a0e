"""Exception hierarchy.

Every error raised by the toolkit derives from :class:`SaddleNodeError` and
carries the name of the module that raised it, which the CLI echoes back.
Precondition failures map to exit code 3, input-syntax failures to 2.
"""

from __future__ import annotations


class SaddleNodeError(Exception):
    module = "saddlenode"


class PreconditionError(SaddleNodeError):
    """An operation was called outside its domain."""


# series_core
class TruncationMismatch(PreconditionError):
    module = "series_core"


class DivisionByNonUnit(PreconditionError):
    module = "series_core"


class NonVanishingShift(PreconditionError):
    module = "series_core"


class SingularLinearPart(PreconditionError):
    module = "series_core"


# vfield
class NonUnitFactor(PreconditionError):
    module = "vfield"


class AxisNotInvariant(PreconditionError):
    module = "vfield"


class ZeroAxisComponent(PreconditionError):
    module = "vfield"


class NotPolynomialInX(PreconditionError):
    module = "vfield"


class ConstraintViolated(PreconditionError):
    module = "normal_forms"

    def __init__(self, constraint: str, module: str | None = None):
        super().__init__(f"constraint violated: {constraint}")
        self.constraint = constraint
        if module is not None:
            self.module = module


# classify
class RationalInput(PreconditionError):
    module = "classify"


# normal_forms
class NotSaddleNode(PreconditionError):
    module = "normal_forms"


class TruncationTooShallow(PreconditionError):
    module = "normal_forms"


class UnsupportedClass(PreconditionError):
    module = "normal_forms"


class IrrationalEigendata(UnsupportedClass):
    pass


class IrrationalScaling(PreconditionError):
    """A normalization needs a root that does not exist in Q(i)."""

    module = "normal_forms"


class ZeroLinearCoefficient(PreconditionError):
    module = "normal_forms"


# blowup
class NonSingularInput(PreconditionError):
    module = "blowup"


class NotEcalle2(PreconditionError):
    module = "blowup"


# gluing
class VanishingG(PreconditionError):
    module = "gluing"


# numerics
class SingularEncounter(PreconditionError):
    module = "numerics"


class StepUnderflow(PreconditionError):
    module = "numerics"


class NonHyperbolic(PreconditionError):
    module = "numerics"


# modular
class PoleOfGamma(PreconditionError):
    module = "modular"


# cli
class ParseError(SaddleNodeError):
    module = "cli"

    def __init__(self, message: str, position: int | None = None):
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")
        self.position = position


class NonPolynomialDenominator(ParseError):
    pass
