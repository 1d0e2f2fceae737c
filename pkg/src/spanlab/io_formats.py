"""Point and graph file formats. Both round-trip bit-exactly via repr/float."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .geometry import Point
from .graph import SpannerGraph


def points_to_text(points: Sequence[Point | Sequence[float]], dim: int | None = None) -> str:
    rows = [tuple(p.coords) if isinstance(p, Point) else tuple(float(c) for c in p) for p in points]
    if dim is None:
        if not rows:
            raise ValueError("cannot infer dimension of an empty point set")
        dim = len(rows[0])
    lines = [f"dim {dim}"]
    for r in rows:
        if len(r) != dim:
            raise ValueError(f"point of dim {len(r)} in a dim-{dim} file")
        lines.append(" ".join(repr(c) for c in r))
    return "\n".join(lines) + "\n"


def points_from_text(text: str) -> tuple[int, list[Point]]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("dim "):
        raise ValueError("point file must start with 'dim <d>'")
    dim = int(lines[0].split()[1])
    pts = []
    for ln in lines[1:]:
        coords = tuple(float(c) for c in ln.split())
        if len(coords) != dim:
            raise ValueError(f"expected {dim} coordinates, got {len(coords)}")
        pts.append(Point(coords))
    return dim, pts


def write_points(path: str | Path, points: Sequence[Point | Sequence[float]], dim: int | None = None) -> None:
    Path(path).write_text(points_to_text(points, dim))


def read_points(path: str | Path) -> tuple[int, list[Point]]:
    return points_from_text(Path(path).read_text())


def write_graph(path: str | Path, g: SpannerGraph) -> None:
    Path(path).write_text(g.to_text())


def read_graph(path: str | Path) -> SpannerGraph:
    return SpannerGraph.from_text(Path(path).read_text())
