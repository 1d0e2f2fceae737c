"""Online (1+eps)-spanner for points on a line.

When a new interior point arrives, it is judged against the shortest spanner
edge containing it: far from both endpoints means both flanking edges are
added, otherwise only the nearer one. Interval edges form a laminar family
whose structural properties (interior-empty at insertion, laminarity, nested
decay) are checkable after every insertion.

The "shortest edge containing x" query is answered in O(log n) by tracking,
for every gap between consecutive points, the deepest edge covering that gap;
any edge containing an interior point of the gap contains the whole gap, so
the deepest covering edge is exactly the shortest containing edge.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right, insort
from dataclasses import dataclass

from .geometry import Metric, REL_TOL
from .graph import SpannerGraph


@dataclass
class IntervalEdge:
    left: float
    right: float
    step: int            # arrival index of the point whose insertion added it
    graph_edge: int      # index into the mirrored SpannerGraph log
    parent: int          # index of the innermost containing edge, -1 at top level

    @property
    def length(self) -> float:
        return self.right - self.left


@dataclass
class Violation:
    code: str            # "P1" | "P2" | "P3"
    edges: tuple[int, ...]
    detail: str


class Spanner1DState:
    def __init__(self, eps: float):
        if eps <= 0:
            raise ValueError("eps must be positive")
        self.eps = eps
        self.graph = SpannerGraph(dim=1, metric=Metric.L2)
        self.edges: list[IntervalEdge] = []
        self.arrivals: list[float] = []
        self._coord_vid: dict[float, int] = {}
        self._coords: list[float] = []        # sorted unique coordinates
        self._vids: list[int] = []            # canonical vertex id per coordinate
        self._gap_deepest: list[int] = []     # per gap i: edge index covering (coords[i], coords[i+1])

    # -- queries -------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.arrivals)

    def monotone_path_weight(self) -> float:
        return opt_1d(self._coords)

    def monotone_path(self) -> list[float]:
        return list(self._coords)

    def containing_edge(self, x: float) -> IntervalEdge | None:
        """Shortest edge whose interval contains x, None for exterior x."""
        pos = bisect_left(self._coords, x)
        if pos < len(self._coords) and self._coords[pos] == x:
            candidates = []
            if pos > 0:
                candidates.append(self._gap_deepest[pos - 1])
            if pos < len(self._gap_deepest):
                candidates.append(self._gap_deepest[pos])
            candidates = [c for c in candidates
                          if self.edges[c].left <= x <= self.edges[c].right]
            if not candidates:
                return None
            best = min(candidates, key=lambda c: (self.edges[c].length, self.edges[c].step))
            return self.edges[best]
        if pos == 0 or pos == len(self._coords):
            return None
        return self.edges[self._gap_deepest[pos - 1]]

    # -- insertion -------------------------------------------------------------

    def insert(self, x: float) -> list[IntervalEdge]:
        if not math.isfinite(x):
            raise ValueError("coordinate must be finite")
        step = len(self.arrivals)
        self.arrivals.append(x)
        vid = self.graph.add_vertex((x,))

        if x in self._coord_vid:
            # coincident point: zero-weight link to the first copy, no interval edge
            self.graph.add_edge(vid, self._coord_vid[x], 0.0)
            return []
        self._coord_vid[x] = vid

        if not self._coords:
            self._coords.append(x)
            self._vids.append(vid)
            return []

        pos = bisect_left(self._coords, x)
        new: list[IntervalEdge] = []
        if pos == 0:
            new.append(self._record(x, self._coords[0], vid, self._vids[0], step, parent=-1))
            self._coords.insert(0, x)
            self._vids.insert(0, vid)
            self._gap_deepest.insert(0, len(self.edges) - 1)
            return new
        if pos == len(self._coords):
            new.append(self._record(self._coords[-1], x, self._vids[-1], vid, step, parent=-1))
            self._coords.append(x)
            self._vids.append(vid)
            self._gap_deepest.append(len(self.edges) - 1)
            return new

        a, b = self._coords[pos - 1], self._coords[pos]
        a_vid, b_vid = self._vids[pos - 1], self._vids[pos]
        gap = pos - 1
        pq_idx = self._gap_deepest[gap]
        pq = self.edges[pq_idx]
        dl, dr = x - pq.left, pq.right - x
        both = min(dl, dr) > (self.eps / 4.0) * pq.length

        left_idx = right_idx = pq_idx
        if both or dl <= dr:
            new.append(self._record(a, x, a_vid, vid, step, parent=pq_idx))
            left_idx = len(self.edges) - 1
        if both or dl > dr:
            new.append(self._record(x, b, vid, b_vid, step, parent=pq_idx))
            right_idx = len(self.edges) - 1

        self._coords.insert(pos, x)
        self._vids.insert(pos, vid)
        self._gap_deepest[gap] = left_idx
        self._gap_deepest.insert(gap + 1, right_idx)
        return new

    def _record(self, left: float, right: float, lvid: int, rvid: int,
                step: int, parent: int) -> IntervalEdge:
        ge = self.graph.add_edge(lvid, rvid, right - left)
        e = IntervalEdge(left, right, step, ge, parent)
        self.edges.append(e)
        return e

    # -- structural checks -----------------------------------------------------

    def check_incremental(self, new_edges: list[IntervalEdge]) -> list[Violation]:
        """Exact (P1)-(P3) check of the freshly added edges.

        For states grown purely through :meth:`insert` this is complete: a new
        edge with empty interior cannot partially overlap existing edges, so
        laminarity follows inductively from (P1).
        """
        out: list[Violation] = []
        tail = len(self.edges) - len(new_edges)
        for off, e in enumerate(new_edges):
            idx = tail + off
            lo = bisect_left(self._coords, e.left)
            hi = bisect_left(self._coords, e.right)
            if hi - lo > 1:
                out.append(Violation("P1", (idx,), f"interior of ({e.left}, {e.right}) is occupied"))
            if e.parent >= 0:
                plen = self.edges[e.parent].length
                if e.length > (1.0 - self.eps / 4.0) * plen * (1.0 + REL_TOL):
                    out.append(Violation(
                        "P3", (idx, e.parent),
                        f"nested length {e.length} > (1-eps/4)*{plen}"))
        return out

    def check_structure(self) -> list[Violation]:
        return check_interval_family(
            [(e.left, e.right, e.step) for e in self.edges], self.eps,
            arrivals=self.arrivals)


def check_interval_family(edges: list[tuple[float, float, int]], eps: float,
                          arrivals: list[float] | None = None) -> list[Violation]:
    """Independent (P1)-(P3) audit of an interval family.

    (P1) needs the arrival log: an edge added at step s may not contain any
    coordinate that arrived strictly before s in its open interval. (P2) and
    (P3) are checked by a laminarity sweep; the nested-decay factor is
    (1 - eps/4) between an edge and its innermost container.
    """
    out: list[Violation] = []

    if arrivals is not None:
        by_step: dict[int, list[int]] = {}
        for i, (_, _, s) in enumerate(edges):
            by_step.setdefault(s, []).append(i)
        seen: list[float] = []
        for step, x in enumerate(arrivals):
            insort(seen, x)
            for i in by_step.get(step, ()):
                l, r, _ = edges[i]
                lo = bisect_right(seen, l)
                if lo < len(seen) and seen[lo] < r:
                    out.append(Violation("P1", (i,),
                                         f"point {seen[lo]} inside ({l}, {r}) at step {step}"))

    order = sorted(range(len(edges)), key=lambda i: (edges[i][0], -edges[i][1]))
    stack: list[int] = []
    for i in order:
        l, r, _ = edges[i]
        while stack and edges[stack[-1]][1] <= l:
            stack.pop()
        if stack:
            pl, pr, _ = edges[stack[-1]]
            if r > pr:
                out.append(Violation("P2", (i, stack[-1]),
                                     f"({l}, {r}) partially overlaps ({pl}, {pr})"))
                continue
            if (r - l) > (1.0 - eps / 4.0) * (pr - pl) * (1.0 + REL_TOL):
                out.append(Violation("P3", (i, stack[-1]),
                                     f"nested length {r - l} > (1-eps/4)*{pr - pl}"))
        stack.append(i)
    return out


def opt_1d(points) -> float:
    """Offline optimum on a line: the leftmost-to-rightmost path weight."""
    xs = [p if isinstance(p, (int, float)) else p[0] for p in points]
    if len(xs) < 2:
        return 0.0
    return max(xs) - min(xs)
