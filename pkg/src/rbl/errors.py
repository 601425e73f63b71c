"""Exception hierarchy for the rbl package.

Three broad classes matter to callers: configuration/usage problems
(``ConfigError``), geometric preconditions (``GeometryError``), and
numerical breakdowns (``NumericalError``).  The CLI maps these onto
exit codes 2 and 3 respectively; experiment tolerance failures are
reported through :class:`ToleranceFailure` (exit code 1).
"""

from __future__ import annotations


class RblError(Exception):
    """Base class for all package errors."""


class ConfigError(RblError):
    """Invalid configuration, flags, or file contents."""


class GeometryError(RblError):
    """A geometric precondition was violated."""


class HoleOverlap(GeometryError):
    """Two closed hole discs intersect."""


class HoleEscapes(GeometryError):
    """A closed hole disc is not strictly inside the outer disc."""


class PointOutsideDomain(GeometryError):
    """An evaluation point is not strictly inside the domain."""


class NotOnBoundary(GeometryError):
    """An anchor point does not lie on any boundary circle."""


class CapTouchesHole(GeometryError):
    """A localization cap intersects a hole disc."""


class NumericalError(RblError):
    """A numerical procedure failed (conditioning, quadrature, ...)."""


class DecompositionFailure(NumericalError):
    """The panel decomposition could not be built (holes too close)."""


class NonFiniteIntegrand(NumericalError):
    """An integrand evaluated to NaN or infinity at a quadrature node."""


class NonFiniteEntry(NumericalError):
    """A Gram matrix entry came out non-finite."""


class IllConditioned(NumericalError):
    """A factorization's condition estimate exceeded its budget."""


class WeightNotPositive(NumericalError):
    """A weight evaluated to a non-positive value inside the domain."""


class DerivativeOrderUnsupported(RblError):
    """A requested derivative order exceeds the basis derivative cap."""


class SingularMinor(NumericalError):
    """A leading minor in the bordered-determinant formula is numerically zero."""


class NegativeDiagonal(NumericalError):
    """A diagonal kernel value came out significantly negative."""


class RankDeficientConstraints(NumericalError):
    """The constraint matrix of an extremal problem is rank deficient."""


class ImageNotCircleDomain(GeometryError):
    """A map sends some boundary circle to a line, or the image is not a circle domain."""


class ToleranceFailure(RblError):
    """An experiment did not meet its declared tolerance."""


class IoError(RblError):
    """A report file could not be written."""
