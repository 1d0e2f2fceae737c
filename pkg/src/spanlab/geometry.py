"""Points, metrics, and the geometric predicates shared by every module."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

REL_TOL = 1e-9


class Metric(str, Enum):
    L1 = "L1"
    L2 = "L2"


@dataclass(frozen=True)
class Point:
    """A d-dimensional coordinate vector. Dimension is fixed per run."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.coords) < 1:
            raise ValueError("point needs at least one coordinate")
        if not all(math.isfinite(c) for c in self.coords):
            raise ValueError(f"non-finite coordinate in {self.coords}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __getitem__(self, i: int) -> float:
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)


def as_point(p: "Point | Sequence[float]") -> Point:
    if isinstance(p, Point):
        return p
    return Point(tuple(float(c) for c in p))


def distance(p: Point | Sequence[float], q: Point | Sequence[float], metric: Metric = Metric.L2) -> float:
    """Metric distance between two points of equal dimension."""
    p = as_point(p)
    q = as_point(q)
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    if metric == Metric.L1:
        return sum(abs(a - b) for a, b in zip(p.coords, q.coords))
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p.coords, q.coords)))


def ellipse_contains(a: Point | Sequence[float], b: Point | Sequence[float], eps: float,
                     p: Point | Sequence[float]) -> bool:
    """Whether p lies in the ellipsoid with foci a, b and great axis (1+eps)*|ab| (L2)."""
    a, b, p = as_point(a), as_point(b), as_point(p)
    dab = distance(a, b)
    if dab == 0.0:
        raise ValueError("foci coincide")
    return distance(p, a) + distance(p, b) <= (1.0 + eps) * dab


def _angle_between_directions(u: Sequence[float], v: Sequence[float]) -> float:
    """Angle between undirected directions, in [0, pi/2]."""
    nu = math.sqrt(sum(c * c for c in u))
    nv = math.sqrt(sum(c * c for c in v))
    dot = abs(sum(a * b for a, b in zip(u, v)))
    c = min(1.0, dot / (nu * nv))
    return math.acos(c)


def near_parallel_weight(segments: Iterable[tuple[Sequence[float], Sequence[float], float]],
                         a: Point | Sequence[float], b: Point | Sequence[float], eps: float) -> float:
    """Total weight of path edges within angle sqrt(eps) of the direction ab.

    ``segments`` yields (u_coords, v_coords, weight) triples. Zero-length
    edges carry no direction and are skipped with a warning.
    """
    a, b = as_point(a), as_point(b)
    dab = [q - p for p, q in zip(a.coords, b.coords)]
    if all(c == 0.0 for c in dab):
        raise ValueError("degenerate direction: a == b")
    threshold = math.sqrt(eps)
    total = 0.0
    for u, v, w in segments:
        d = [q - p for p, q in zip(u, v)]
        if all(c == 0.0 for c in d):
            warnings.warn("zero-length edge in path skipped", stacklevel=2)
            continue
        if _angle_between_directions(d, dab) <= threshold + 1e-12:
            total += w
    return total
