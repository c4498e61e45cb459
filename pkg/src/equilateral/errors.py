"""Exception hierarchy shared by the package."""


class EquilateralError(Exception):
    """Base class for all package errors."""


class DimensionError(EquilateralError, ValueError):
    """Vector or point set has the wrong dimension."""


class InvalidNormError(EquilateralError, ValueError):
    """A norm description does not define a norm."""


class PreconditionError(EquilateralError, ValueError):
    """A theorem hypothesis (distortion bound, parameter range) is not met."""


class NormalizationError(PreconditionError):
    """The sandwich normalization ``||x|| <= ||x||_ref`` fails.

    ``rescale`` is the factor by which the norm must be multiplied for the
    normalization to hold.
    """

    def __init__(self, message, rescale):
        super().__init__(message)
        self.rescale = rescale


class UnsupportedFamilyError(EquilateralError, ValueError):
    """No closed-form certificate is available for this norm family."""


class BoxViolationError(EquilateralError, ArithmeticError):
    """A map left its box by more than the clamping tolerance."""
