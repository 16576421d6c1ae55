"""Exception hierarchy for django-upb.

Every domain error is a ``ValueError`` so callers treating bad numerical
input generically keep working.
"""

from typing import Optional, Tuple


class UPBError(ValueError):
    """Base class for all django-upb domain errors."""


class LayoutError(UPBError):
    """Mismatched dimensions, permutations, partitions or bipartitions."""


class NotHermitianError(UPBError):
    """Operator fails the Hermiticity tolerance."""


class NotUnitaryError(UPBError):
    """Operator supplied as a local unitary is not unitary."""


class OrthogonalityError(UPBError):
    """A set that must be orthogonal contains an overlapping pair."""

    def __init__(
        self, message: str, pair: Optional[Tuple[int, int]] = None,
        overlap: float = 0.0,
    ) -> None:
        super().__init__(message)
        self.pair = pair
        self.overlap = overlap


class AngleError(UPBError):
    """Basis angle outside the open interval (0, pi/2)."""


class SymbolError(UPBError):
    """Unknown or unbindable symbol in an orthogonal matrix."""

    def __init__(
        self, message: str, row: Optional[int] = None, column: Optional[int] = None
    ) -> None:
        super().__init__(message)
        self.row = row
        self.column = column


class CatalogError(UPBError):
    """Unknown builtin name or invalid table entry."""

    def __init__(self, message: str, index: Optional[int] = None) -> None:
        super().__init__(message)
        self.index = index


class StateError(UPBError):
    """Density operator violates trace or positivity requirements."""


class GridTooLargeError(UPBError):
    """Requested oracle grid exceeds GRID_MAX_POINTS."""


class TranscriptionError(UPBError):
    """Closed-form coefficient data is internally inconsistent."""
