"""Exact normal forms, blow-ups, gluing invariants and holonomy for planar
vector-field singularities, with saddle-nodes as the main case."""

__version__ = "0.1.0"

from .series import TruncatedSeries1, TruncatedSeries2, LaurentSlice  # noqa: E402
from .vfield import CoordinateChange, PlanarVectorField, pullback, pushforward  # noqa: E402
from .classify import classify, eigen_data  # noqa: E402

__all__ = [
    "__version__",
    "TruncatedSeries1",
    "TruncatedSeries2",
    "LaurentSlice",
    "CoordinateChange",
    "PlanarVectorField",
    "pullback",
    "pushforward",
    "classify",
    "eigen_data",
]
