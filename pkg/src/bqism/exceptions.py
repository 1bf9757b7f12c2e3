"""Exception types raised by the library."""


class BQISMError(ValueError):
    """Base class for all input/validation errors."""


class DimensionError(BQISMError):
    """Operand shapes are incompatible with the requested operation."""


class PoleError(BQISMError):
    """A spectral parameter lies too close to a pole of a rational entry."""


class SingularMatrixError(BQISMError):
    """A matrix that has to be inverted is (numerically) singular."""


class SpecError(BQISMError):
    """Invalid model parameters or chain description."""
