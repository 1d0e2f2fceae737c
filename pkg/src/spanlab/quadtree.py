"""Online non-Steiner (1+eps)-spanner via a globally aligned grid hierarchy.

Levels index a fixed dyadic lattice: level l has cell side ``base_scale *
2**-l`` (larger l is finer), so cells never move as the point set grows.
Each cell keeps its first-ever occupant as a stable representative. When a
point founds a new cell at some level, the new representative is linked to
every existing representative at that level whose distance falls in the
annulus [c1*side/eps, c2*side/eps].

Levels are instantiated lazily over the window where the annulus can be
nonempty: sides between eps*minpair/c2 and eps*diam/c1. Coarser and finer
levels provably contribute no edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Metric
from .graph import SpannerGraph


@dataclass
class AnnulusRule:
    c1: float = 1.0
    c2: float = 6.0

    def __post_init__(self) -> None:
        if not (0 < self.c1 < self.c2):
            raise ValueError("need 0 < c1 < c2")


class _RepStore:
    """Per-level representative registry with a growable coordinate buffer."""

    def __init__(self, dim: int):
        self._arr = np.empty((16, dim), dtype=np.float64)
        self.vids: list[int] = []

    def append(self, vid: int, coords) -> None:
        n = len(self.vids)
        if n == self._arr.shape[0]:
            grown = np.empty((2 * n, self._arr.shape[1]), dtype=np.float64)
            grown[:n] = self._arr
            self._arr = grown
        self._arr[n] = coords
        self.vids.append(vid)

    def view(self) -> np.ndarray:
        return self._arr[: len(self.vids)]


@dataclass
class CellEntry:
    representative: int
    count: int = 1


class GridHierarchy:
    def __init__(self, dim: int, base_scale: float = 1.0):
        self.dim = dim
        self.base_scale = base_scale
        self.levels: dict[int, dict[tuple[int, ...], CellEntry]] = {}
        self.reps: dict[int, _RepStore] = {}

    def side(self, level: int) -> float:
        return self.base_scale * 2.0 ** (-level)

    def cell_key(self, coords, level: int) -> tuple[int, ...]:
        side = self.side(level)
        return tuple(int(math.floor(c / side)) for c in coords)

    def instantiated(self) -> list[int]:
        return sorted(self.levels)

    def add_level(self, level: int) -> None:
        if level not in self.levels:
            self.levels[level] = {}
            self.reps[level] = _RepStore(self.dim)

    def register(self, level: int, vid: int, coords) -> bool:
        """Place a point in its cell; True when it becomes the representative."""
        key = self.cell_key(coords, level)
        cells = self.levels[level]
        entry = cells.get(key)
        if entry is None:
            cells[key] = CellEntry(representative=vid)
            return True
        entry.count += 1
        return False


class QuadtreeSpanner:
    def __init__(self, eps: float, dim: int, rule: AnnulusRule | None = None,
                 base_scale: float = 1.0):
        if eps <= 0:
            raise ValueError("eps must be positive")
        self.eps = eps
        self.dim = dim
        self.rule = rule or AnnulusRule()
        self.grid = GridHierarchy(dim, base_scale)
        self.graph = SpannerGraph(dim, Metric.L2)
        self.edge_level: dict[int, int] = {}
        self._level_edges: dict[int, list[int]] = {}
        self._coord_vid: dict[tuple[float, ...], int] = {}
        self._distinct = np.empty((16, dim), dtype=np.float64)
        self._distinct_n = 0
        self._diam = 0.0
        self._minpair = math.inf

    # -- bookkeeping ---------------------------------------------------------

    def _distinct_view(self) -> np.ndarray:
        return self._distinct[: self._distinct_n]

    def _append_distinct(self, coords) -> None:
        n = self._distinct_n
        if n == self._distinct.shape[0]:
            grown = np.empty((2 * n, self.dim), dtype=np.float64)
            grown[:n] = self._distinct
            self._distinct = grown
        self._distinct[n] = coords
        self._distinct_n += 1

    def _level_window(self) -> tuple[int, int] | None:
        if self._diam <= 0.0 or not math.isfinite(self._minpair):
            return None
        c1, c2, eps, u = self.rule.c1, self.rule.c2, self.eps, self.grid.base_scale
        top = math.ceil(math.log2(c1 * u / (eps * self._diam)))
        bot = math.floor(math.log2(c2 * u / (eps * self._minpair)))
        return top, bot

    # -- insertion -------------------------------------------------------------

    def insert(self, coords) -> list[int]:
        coords = tuple(float(c) for c in coords)
        if len(coords) != self.dim:
            raise ValueError(f"expected dim {self.dim}")
        vid = self.graph.add_vertex(coords)
        first = self._coord_vid.get(coords)
        if first is not None:
            self.graph.add_edge(vid, first, 0.0)
            return []
        self._coord_vid[coords] = vid

        if self._distinct_n:
            diffs = self._distinct_view() - np.asarray(coords)
            dists = np.sqrt((diffs * diffs).sum(axis=1))
            self._diam = max(self._diam, float(dists.max()))
            self._minpair = min(self._minpair, float(dists.min()))
        self._append_distinct(coords)

        new_edges: list[int] = []
        window = self._level_window()
        if window is None:
            return new_edges
        top, bot = window

        known = set(self.grid.levels)
        for level in range(top, bot + 1):
            if level in known:
                continue
            self.grid.add_level(level)
            # sweep all previous distinct points in arrival order, then fall
            # through to register the new point like any other level
            for pvid, pcoords in self._iter_distinct_sorted():
                if pvid == vid:
                    continue
                if self.grid.register(level, pvid, pcoords):
                    new_edges.extend(self._scan(level, pvid, pcoords))
                    self.grid.reps[level].append(pvid, pcoords)

        for level in self.grid.instantiated():
            if self.grid.register(level, vid, coords):
                new_edges.extend(self._scan(level, vid, coords))
                self.grid.reps[level].append(vid, coords)
        return new_edges

    def _iter_distinct_sorted(self):
        # distinct points in insertion order; vertex ids of first copies ascend
        items = sorted(self._coord_vid.items(), key=lambda kv: kv[1])
        for coords, vid in items:
            yield vid, coords

    def _scan(self, level: int, vid: int, coords) -> list[int]:
        store = self.grid.reps[level]
        if not store.vids:
            return []
        side = self.grid.side(level)
        lo = self.rule.c1 * side / self.eps
        hi = self.rule.c2 * side / self.eps
        diffs = store.view() - np.asarray(coords)
        dists = np.sqrt((diffs * diffs).sum(axis=1))
        mask = (dists >= lo * (1 - 1e-12)) & (dists <= hi * (1 + 1e-12))
        out: list[int] = []
        for i in np.nonzero(mask)[0]:
            other = store.vids[i]
            w = math.dist(coords, self.graph.coords_of(other))
            if not (lo <= w <= hi):
                continue
            if self.graph.has_edge(vid, other):
                continue
            e = self.graph._append_edge(vid, other, w)
            self.edge_level[e] = level
            self._level_edges.setdefault(level, []).append(e)
            out.append(e)
        return out

    # -- queries ---------------------------------------------------------------

    def level_edges(self, level: int) -> list[int]:
        return list(self._level_edges.get(level, ()))

    def per_level_stats(self) -> list[tuple[int, int, float]]:
        out = []
        for level in sorted(self._level_edges):
            idxs = self._level_edges[level]
            weight = sum(self.graph.edge(i)[2] for i in idxs)
            out.append((level, len(idxs), weight))
        return out

    def annulus_bounds(self, level: int) -> tuple[float, float]:
        side = self.grid.side(level)
        return self.rule.c1 * side / self.eps, self.rule.c2 * side / self.eps
