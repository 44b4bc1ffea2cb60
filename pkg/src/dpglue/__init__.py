"""Exact DP-coloring computations on small graphs and their covers."""

from .cover import Cover, PermTable, canonical_cover, relabel, validate
from .counting import (
    canonical_dp_color_function,
    count_colorings,
    count_with_prescribed,
    dp_color_function,
)
from .errors import InvalidArgument, ResourceLimit, VerificationFailure
from .graph import Graph, chromatic_polynomial
from .poly import IntPoly

__version__ = "0.1.0"

__all__ = [
    "Cover",
    "Graph",
    "IntPoly",
    "InvalidArgument",
    "PermTable",
    "ResourceLimit",
    "VerificationFailure",
    "canonical_cover",
    "canonical_dp_color_function",
    "chromatic_polynomial",
    "count_colorings",
    "count_with_prescribed",
    "dp_color_function",
    "relabel",
    "validate",
]
