"""Semantic exception hierarchy shared by all sact modules."""

from __future__ import annotations


class SactError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SactError, ValueError):
    """An input lies outside its mathematical domain (probability bounds,
    degenerate utility orderings, invalid profile densities, ...)."""


class UnknownEvidenceError(SactError, LookupError):
    """An evidence id was referenced that the model does not define."""


class ObservationError(SactError, ValueError):
    """An observation does not cover exactly what the operation requires."""


class CapExceededError(SactError):
    """A computation was refused because it exceeds a configured size cap."""


class MethodError(SactError, ValueError):
    """The requested evaluation method is not supported by the operation."""


class FormatError(SactError, ValueError):
    """A file or byte blob does not conform to its declared format."""


class DigestMismatchError(SactError):
    """A compiled artifact was produced from a different model than supplied."""
