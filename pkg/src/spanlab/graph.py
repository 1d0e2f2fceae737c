"""Append-only spanner graph, shortest paths, stretch certification, and MST.

A :class:`SpannerGraph` is the single artifact every algorithm grows. Edges
are stored in compact column arrays (ids, weights, liveness) so graphs with
millions of edges stay affordable; verification runs on a scipy CSR view.
"""

from __future__ import annotations

import heapq
import math
from array import array
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import Metric, Point, REL_TOL, distance

INPUT = 0
STEINER = 1

_KIND_NAMES = {INPUT: "input", STEINER: "steiner"}
_KIND_CODES = {"input": INPUT, "steiner": STEINER}


@dataclass
class StretchReport:
    max_stretch: float
    witness: tuple[int, int, float, float] | None  # (u, v, path weight, direct distance)
    pairs_checked: int

    def passes(self, t: float) -> bool:
        return self.max_stretch <= t * (1.0 + REL_TOL)


class SpannerGraph:
    """Weighted graph over input and Steiner vertices; edges are append-only.

    The only permitted mutation besides appending is subdividing an edge with
    a collinear Steiner point, which replaces it by two sub-edges of equal
    total weight. The replacement log keeps the full history.
    """

    def __init__(self, dim: int, metric: Metric = Metric.L2):
        self.dim = dim
        self.metric = Metric(metric)
        self._coords = array("d")
        self._kinds = bytearray()
        self._eu = array("q")
        self._ev = array("q")
        self._ew = array("d")
        self._alive = bytearray()
        self.replacements: dict[int, tuple[int, int, int]] = {}  # old edge -> (steiner vid, e1, e2)
        self._edge_set: set[tuple[int, int]] = set()
        self._adj_dirty = True
        self._adj: list[list[tuple[int, float]]] | None = None

    # -- vertices ----------------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self._kinds)

    @property
    def edge_count(self) -> int:
        """Live edges only."""
        return int(sum(self._alive))

    def add_vertex(self, coords: Sequence[float], kind: int = INPUT) -> int:
        if len(coords) != self.dim:
            raise ValueError(f"expected dim {self.dim}, got {len(coords)}")
        vid = len(self._kinds)
        self._coords.extend(float(c) for c in coords)
        self._kinds.append(kind)
        return vid

    def coords_of(self, vid: int) -> tuple[float, ...]:
        base = vid * self.dim
        return tuple(self._coords[base:base + self.dim])

    def point_of(self, vid: int) -> Point:
        return Point(self.coords_of(vid))

    def kind_of(self, vid: int) -> int:
        return self._kinds[vid]

    def input_vertices(self) -> list[int]:
        return [i for i, k in enumerate(self._kinds) if k == INPUT]

    def coords_array(self) -> np.ndarray:
        return np.frombuffer(self._coords, dtype=np.float64).reshape(-1, self.dim).copy()

    # -- edges -------------------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        return ((u, v) if u < v else (v, u)) in self._edge_set

    def add_edge(self, u: int, v: int, weight: float | None = None) -> int:
        if u == v:
            raise ValueError("self-loops are forbidden")
        if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
            raise KeyError(f"unknown vertex id in ({u}, {v})")
        d = distance(self.coords_of(u), self.coords_of(v), self.metric)
        if weight is None:
            weight = d
        elif not math.isclose(weight, d, rel_tol=REL_TOL, abs_tol=REL_TOL):
            raise ValueError(f"edge weight {weight} does not match metric distance {d}")
        return self._append_edge(u, v, weight)

    def _append_edge(self, u: int, v: int, weight: float) -> int:
        """Trusted fast path: caller guarantees the weight is the metric
        distance. The invariant stays auditable via verify_edge_weights."""
        key = (u, v) if u < v else (v, u)
        if key in self._edge_set:
            raise ValueError(f"duplicate edge {key}")
        idx = len(self._ew)
        self._eu.append(u)
        self._ev.append(v)
        self._ew.append(weight)
        self._alive.append(1)
        self._edge_set.add(key)
        self._adj_dirty = True
        return idx

    def edge(self, idx: int) -> tuple[int, int, float, bool]:
        return self._eu[idx], self._ev[idx], self._ew[idx], bool(self._alive[idx])

    def live_edges(self) -> Iterable[tuple[int, int, int, float]]:
        for i in range(len(self._ew)):
            if self._alive[i]:
                yield i, self._eu[i], self._ev[i], self._ew[i]

    def log_length(self) -> int:
        return len(self._ew)

    def subdivide_edge(self, idx: int, coords: Sequence[float]) -> tuple[int, int, int]:
        """Replace edge ``idx`` by two collinear sub-edges through a new Steiner vertex.

        Weight-neutral by construction; the replaced edge stays in the log.
        """
        if not self._alive[idx]:
            raise ValueError(f"edge {idx} was already replaced")
        u, v = self._eu[idx], self._ev[idx]
        du = distance(coords, self.coords_of(u), self.metric)
        dv = distance(coords, self.coords_of(v), self.metric)
        w = self._ew[idx]
        if not math.isclose(du + dv, w, rel_tol=REL_TOL, abs_tol=REL_TOL):
            raise ValueError("subdivision point is not on the edge")
        s = self.add_vertex(coords, STEINER)
        self._alive[idx] = 0
        self._edge_set.discard((u, v) if u < v else (v, u))
        e1 = self.add_edge(u, s, du)
        e2 = self.add_edge(s, v, dv)
        self.replacements[idx] = (s, e1, e2)
        self._adj_dirty = True
        return s, e1, e2

    # -- weights and paths ---------------------------------------------------

    def graph_weight(self) -> float:
        """Sum of live edge weights; subdivisions are weight-neutral."""
        if not self._ew:
            return 0.0
        w = np.frombuffer(self._ew, dtype=np.float64)
        alive = np.frombuffer(self._alive, dtype=np.uint8).astype(bool)
        return float(w[alive].sum())

    def _adjacency(self) -> list[list[tuple[int, float]]]:
        if self._adj is None or self._adj_dirty:
            adj: list[list[tuple[int, float]]] = [[] for _ in range(self.vertex_count)]
            for i in range(len(self._ew)):
                if self._alive[i]:
                    u, v, w = self._eu[i], self._ev[i], self._ew[i]
                    adj[u].append((v, w))
                    adj[v].append((u, w))
            self._adj = adj
            self._adj_dirty = False
        return self._adj

    def shortest_path_weight(self, u: int, v: int) -> float:
        """Minimum path weight between two vertex ids; inf when disconnected."""
        w, _ = self.shortest_path(u, v, with_path=False)
        return w

    def shortest_path(self, u: int, v: int, with_path: bool = True) -> tuple[float, list[int]]:
        """Dijkstra with early exit; returns (weight, vertex id path)."""
        n = self.vertex_count
        if not (0 <= u < n and 0 <= v < n):
            raise KeyError(f"unknown vertex id in ({u}, {v})")
        if u == v:
            return 0.0, [u]
        adj = self._adjacency()
        dist = {u: 0.0}
        prev: dict[int, int] = {}
        heap = [(0.0, u)]
        while heap:
            d, x = heapq.heappop(heap)
            if x == v:
                break
            if d > dist.get(x, math.inf):
                continue
            for y, w in adj[x]:
                nd = d + w
                if nd < dist.get(y, math.inf):
                    dist[y] = nd
                    prev[y] = x
                    heapq.heappush(heap, (nd, y))
        if v not in dist:
            return math.inf, []
        if not with_path:
            return dist[v], []
        path = [v]
        while path[-1] != u:
            path.append(prev[path[-1]])
        path.reverse()
        return dist[v], path

    def csr(self):
        """Symmetric CSR matrix of live edges for scipy shortest-path calls."""
        from scipy.sparse import csr_matrix

        n = self.vertex_count
        if not self._ew:
            return csr_matrix((n, n))
        eu = np.frombuffer(self._eu, dtype=np.int64)
        ev = np.frombuffer(self._ev, dtype=np.int64)
        ew = np.frombuffer(self._ew, dtype=np.float64)
        alive = np.frombuffer(self._alive, dtype=np.uint8).astype(bool)
        eu, ev, ew = eu[alive], ev[alive], ew[alive]
        rows = np.concatenate([eu, ev])
        cols = np.concatenate([ev, eu])
        data = np.concatenate([ew, ew])
        return csr_matrix((data, (rows, cols)), shape=(n, n))

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"spanner-graph dim {self.dim} metric {self.metric.value}"]
        for vid in range(self.vertex_count):
            coords = " ".join(repr(c) for c in self.coords_of(vid))
            lines.append(f"vertex {vid} {_KIND_NAMES[self._kinds[vid]]} {coords}")
        for i in range(len(self._ew)):
            lines.append(f"edge {self._eu[i]} {self._ev[i]} {repr(self._ew[i])} {i}")
        for old, (s, e1, e2) in sorted(self.replacements.items()):
            lines.append(f"replaced {old} {s} {e1} {e2}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SpannerGraph":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "spanner-graph":
            raise ValueError("not a spanner graph file")
        g = cls(int(head[2]), Metric(head[4]))
        pending_edges: list[tuple[int, int, float]] = []
        replaced: list[tuple[int, int, int, int]] = []
        for ln in lines[1:]:
            parts = ln.split()
            if parts[0] == "vertex":
                vid = g.add_vertex([float(c) for c in parts[3:]], _KIND_CODES[parts[1 + 1]])
                if vid != int(parts[1]):
                    raise ValueError("vertex ids must be consecutive")
            elif parts[0] == "edge":
                pending_edges.append((int(parts[1]), int(parts[2]), float(parts[3])))
            elif parts[0] == "replaced":
                replaced.append(tuple(int(x) for x in parts[1:]))  # type: ignore[arg-type]
            else:
                raise ValueError(f"unknown record {parts[0]!r}")
        dead = {old for old, _, _, _ in replaced}
        for i, (u, v, w) in enumerate(pending_edges):
            g._eu.append(u)
            g._ev.append(v)
            g._ew.append(w)
            alive = i not in dead
            g._alive.append(1 if alive else 0)
            if alive:
                g._edge_set.add((u, v) if u < v else (v, u))
        for old, s, e1, e2 in replaced:
            g.replacements[old] = (s, e1, e2)
        g._adj_dirty = True
        return g


def verify_edge_weights(g: SpannerGraph) -> list[int]:
    """Indices of edges whose stored weight differs from the metric distance
    of their endpoints beyond 1e-9 relative tolerance."""
    bad = []
    for i, u, v, w in g.live_edges():
        d = distance(g.coords_of(u), g.coords_of(v), g.metric)
        if not math.isclose(w, d, rel_tol=REL_TOL, abs_tol=REL_TOL):
            bad.append(i)
    return bad


# -- verification ------------------------------------------------------------


def verify_stretch(g: SpannerGraph, t: float, pairs: Sequence[tuple[int, int]] | None = None,
                   chunk_bytes: int = 200_000_000) -> StretchReport:
    """Certify max path-weight / direct-distance over input pairs.

    ``pairs=None`` checks all distinct input-vertex pairs. Coincident pairs
    contribute stretch 1 but must be connected. Disconnected pairs report
    infinite stretch rather than raising.
    """
    if t < 1.0:
        raise ValueError("stretch bound must be >= 1")
    from scipy.sparse.csgraph import dijkstra

    inputs = g.input_vertices()
    report = StretchReport(max_stretch=0.0, witness=None, pairs_checked=0)
    if pairs is None and len(inputs) < 2:
        return report

    coords = g.coords_array()
    csr = g.csr()
    n = g.vertex_count

    def direct_dists(src: int, targets: np.ndarray) -> np.ndarray:
        diff = coords[targets] - coords[src]
        if g.metric == Metric.L1:
            return np.abs(diff).sum(axis=1)
        return np.sqrt((diff * diff).sum(axis=1))

    if pairs is not None:
        by_source: dict[int, list[int]] = {}
        for u, v in pairs:
            if not (0 <= u < n and 0 <= v < n):
                raise KeyError(f"unknown vertex id in pair ({u}, {v})")
            by_source.setdefault(u, []).append(v)
        for u, vs in by_source.items():
            dist_row = dijkstra(csr, directed=False, indices=u)
            targets = np.asarray(vs, dtype=np.int64)
            _scan_stretch(report, u, targets, dist_row[targets], direct_dists(u, targets))
        return report

    src = np.asarray(inputs, dtype=np.int64)
    per_row = max(1, chunk_bytes // (8 * max(1, n)))
    arr_inputs = src
    for lo in range(0, len(src), per_row):
        idx = src[lo:lo + per_row]
        dmat = dijkstra(csr, directed=False, indices=idx)
        for row, u in enumerate(idx):
            # only pairs (u, v) with v later in the input order: each pair once
            targets = arr_inputs[lo + row + 1:]
            if len(targets) == 0:
                continue
            _scan_stretch(report, int(u), targets, dmat[row, targets], direct_dists(int(u), targets))
    return report


def _scan_stretch(report: StretchReport, u: int, targets: np.ndarray,
                  path_w: np.ndarray, direct: np.ndarray) -> None:
    report.pairs_checked += len(targets)
    zero = direct == 0.0
    if zero.any():
        disconnected = zero & ~np.isfinite(path_w)
        if disconnected.any():
            v = int(targets[disconnected][0])
            report.max_stretch = math.inf
            report.witness = (u, v, math.inf, 0.0)
            return
        if report.max_stretch < 1.0:
            v = int(targets[zero][0])
            report.max_stretch = 1.0
            report.witness = (u, v, 0.0, 0.0)
    nz = ~zero
    if not nz.any():
        return
    stretch = path_w[nz] / direct[nz]
    i = int(np.argmax(stretch))
    if stretch[i] > report.max_stretch:
        report.max_stretch = float(stretch[i])
        v = int(targets[nz][i])
        report.witness = (u, v, float(path_w[nz][i]), float(direct[nz][i]))


# -- MST ----------------------------------------------------------------------


def mst_weight(points: Sequence[Point | Sequence[float]], metric: Metric = Metric.L2) -> float:
    """Weight of a minimum spanning tree of the complete graph on ``points``.

    Prim with numpy rows; 1D collapses to max - min.
    """
    pts = [p.coords if isinstance(p, Point) else tuple(float(c) for c in p) for p in points]
    if len(pts) == 0:
        raise ValueError("mst_weight needs at least one point")
    if len(pts) == 1:
        return 0.0
    arr = np.asarray(pts, dtype=np.float64)
    if arr.shape[1] == 1:
        return float(arr.max() - arr.min())
    n = len(arr)
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    in_tree[0] = True
    best_from_zero = _dist_rows(arr, 0, metric)
    best = np.minimum(best, best_from_zero)
    best[0] = np.inf
    total = 0.0
    for _ in range(n - 1):
        j = int(np.argmin(best))
        total += float(best[j])
        in_tree[j] = True
        best[j] = np.inf
        d = _dist_rows(arr, j, metric)
        d[in_tree] = np.inf
        best = np.minimum(best, d)
    return total


def _dist_rows(arr: np.ndarray, i: int, metric: Metric) -> np.ndarray:
    diff = arr - arr[i]
    if metric == Metric.L1:
        return np.abs(diff).sum(axis=1)
    return np.sqrt((diff * diff).sum(axis=1))
