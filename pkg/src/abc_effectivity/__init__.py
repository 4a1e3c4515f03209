"""Exact arithmetic toolkit for effective height bounds on P^1 minus three points.

The package builds explicit non-critical Belyi maps on Fermat curves, compares
heights through integral dependencies, and assembles the resulting constants.
"""

__version__ = "0.1.0"

from .algebraic import AlgebraicNumber, PlaceQ, ProjPoint
from .heights import conductor, height_point, in_compact_set, log_root_disc

__all__ = [
    "AlgebraicNumber",
    "PlaceQ",
    "ProjPoint",
    "conductor",
    "height_point",
    "in_compact_set",
    "log_root_disc",
    "__version__",
]
