from __future__ import annotations


class BaseToricFSignatureException(Exception):
    """Base exception for errors raised in the toric_fsig package"""


class InvalidInputError(BaseToricFSignatureException):
    """Malformed input: empty or ragged vectors, zero vectors, floats for rationals"""


class EffectivityError(InvalidInputError):
    """A divisor coefficient is negative"""


class ExponentRangeError(InvalidInputError):
    """The ideal exponent t is negative"""


class InvalidConeError(InvalidInputError):
    """The cone is not strongly convex"""


class PreconditionError(BaseToricFSignatureException):
    """Well-formed input that lies outside the domain of the requested operation"""


class ContainmentError(PreconditionError):
    """A lattice is not contained in the lattice it was compared against"""


class DegeneratePairingError(PreconditionError):
    """A pairing vanishes identically on a lattice"""


class NotFullDimensionalError(PreconditionError):
    """The cone has torus factors; split them off with split_torus_factors first"""


class UnboundedPolytopeError(PreconditionError):
    """A bounded polytope was required but the input has a recession ray"""

    def __init__(self, ray: tuple[int, ...]) -> None:
        self.ray = ray
        super().__init__(f"polytope is unbounded along recession ray {list(ray)}")


class IntegralityError(PreconditionError):
    """q*t or q*a_i is not an integer for the requested q"""


class SinghPresentationError(PreconditionError):
    """The semigroup presentation is not full or lacks property (*)"""


class ReflectionMismatchError(PreconditionError):
    """The Q-Gorenstein reflection volume disagreed with the triple polytope volume"""


class ConfigurationError(BaseToricFSignatureException):
    """An environment setting could not be parsed"""
