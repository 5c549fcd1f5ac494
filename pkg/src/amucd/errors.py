"""Exception hierarchy shared by every module."""

from __future__ import annotations


class AmucdError(Exception):
    """Base class for all library errors."""


class DomainViolation(AmucdError, ValueError):
    """A point lies outside the domain of the space (or is not finite)."""


class OrderCapExceeded(AmucdError, ValueError):
    """A derivative order is negative or exceeds the space's cap."""


class SpaceMismatch(AmucdError, ValueError):
    """A signal or element belongs to a different space than requested."""


class MultiplicityError(AmucdError, ValueError):
    """An element's order disagrees with the count of earlier equal centers."""


class LinearDependence(AmucdError):
    """An element is numerically dependent on the elements before it.

    ``index`` is the position the rejected element would have occupied.
    """

    def __init__(self, index: int, residual_sq: float, diagonal: float):
        self.index = index
        self.residual_sq = residual_sq
        self.diagonal = diagonal
        super().__init__(
            f"element {index} rejected: residual norm^2 {residual_sq:.3e} "
            f"below threshold relative to diagonal {diagonal:.3e}"
        )


class AllCandidatesDependent(AmucdError):
    """Every candidate point was rejected by the dependence guard."""


class NumericalConsistencyError(AmucdError, ArithmeticError):
    """A computed quantity violated a consistency check (e.g. negative energy)."""


class BandViolation(AmucdError, ValueError):
    """A spectral abscissa lies outside [-pi/h, pi/h]."""


class SingularSystem(AmucdError, ArithmeticError):
    """The oracle's normal equations are not positive definite."""


class ParseError(AmucdError, ValueError):
    """An input file is missing or is not valid JSON."""


class SchemaError(AmucdError, ValueError):
    """An input file is valid JSON but violates the expected schema."""
