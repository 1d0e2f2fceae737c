"""spanlab: online Euclidean spanner algorithms, adversaries, and certification."""

from .geometry import Metric, Point, distance, ellipse_contains, near_parallel_weight
from .graph import INPUT, STEINER, SpannerGraph, StretchReport, mst_weight, verify_stretch

__all__ = [
    "Metric",
    "Point",
    "distance",
    "ellipse_contains",
    "near_parallel_weight",
    "INPUT",
    "STEINER",
    "SpannerGraph",
    "StretchReport",
    "mst_weight",
    "verify_stretch",
]

__version__ = "0.1.0"
