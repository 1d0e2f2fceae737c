"""Shallow-light trees: near-shortest root-to-leaf paths at bounded total weight.

The default construction is a comb: the leaf patch is chained into a spine,
and a greedily chosen subset of leaves ("teeth") is wired straight to the
root. Teeth thin out toward the lateral extremes, where the direct distance
grows and buys slack, and stay dense in the middle, where a spine detour is
pure overhead. Teeth are added until every root-to-leaf path is within the
stretch budget, so the contract holds by construction; lightness comes from
the graded spacing. A star fallback wires every leaf to the root: stretch
exactly 1, heavier by roughly the leaf count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_KAPPA = 10.0     # weight budget: total <= kappa * dist(root, leaf plane)
STRETCH_MARGIN = 0.9     # teeth are added until stretch <= 1 + margin * eps


@dataclass
class SltTree:
    root: tuple[float, ...]
    leaves: list[tuple[float, ...]]
    edges: list[tuple[tuple[float, ...], tuple[float, ...], float]]
    style: str
    dist: float                      # root distance to the leaf plane
    total_weight: float = 0.0
    max_root_stretch: float = 1.0

    def recompute_stats(self) -> None:
        self.total_weight = sum(w for _, _, w in self.edges)
        adj: dict[tuple[float, ...], list[tuple[tuple[float, ...], float]]] = {}
        for u, v, w in self.edges:
            adj.setdefault(u, []).append((v, w))
            adj.setdefault(v, []).append((u, w))
        import heapq

        dist = {self.root: 0.0}
        heap = [(0.0, self.root)]
        while heap:
            d, x = heapq.heappop(heap)
            if d > dist.get(x, math.inf):
                continue
            for y, w in adj.get(x, ()):
                nd = d + w
                if nd < dist.get(y, math.inf):
                    dist[y] = nd
                    heapq.heappush(heap, (nd, y))
        worst = 1.0
        for leaf in self.leaves:
            if leaf not in dist:
                raise ValueError("disconnected leaf in SLT")
            direct = math.dist(self.root, leaf)
            if direct > 0:
                worst = max(worst, dist[leaf] / direct)
        self.max_root_stretch = worst


def build_slt(root, leaves, eps: float, style: str = "dyadic") -> SltTree:
    """Tree from ``root`` to leaves on a segment (or planar patch in 3D).

    Contract: every root-to-leaf tree path weighs at most (1+eps) times the
    straight segment, and the whole tree weighs at most kappa * dist(root,
    leaf plane) in the design regime (patch extent ~ sqrt(eps) * dist).
    A root on the leaf plane degenerates to a star.
    """
    root = tuple(float(c) for c in root)
    leaf_list = [tuple(float(c) for c in leaf) for leaf in leaves]
    if not leaf_list:
        raise ValueError("need at least one leaf")
    seen = set()
    uniq = [l for l in leaf_list if not (l in seen or seen.add(l))]
    arr = np.asarray(uniq)
    root_arr = np.asarray(root)
    dist = _plane_distance(root_arr, arr)

    edges: list[tuple[tuple[float, ...], tuple[float, ...], float]] = []

    def link(u, v) -> None:
        u = tuple(map(float, u))
        v = tuple(map(float, v))
        if u != v:
            edges.append((u, v, math.dist(u, v)))

    if style == "star" or dist <= 0.0 or len(uniq) == 1:
        for leaf in uniq:
            link(root, leaf)
        tree = SltTree(root, uniq, edges,
                       "star" if (style == "star" or len(uniq) > 1) else "dyadic", dist)
        tree.recompute_stats()
        return tree
    if style != "dyadic":
        raise ValueError(f"unknown SLT style {style!r}")

    order = _spine_order(arr)
    spine = arr[order]

    # cumulative spine distance from the first leaf
    hops = np.linalg.norm(np.diff(spine, axis=0), axis=1)
    along = np.concatenate([[0.0], np.cumsum(hops)])
    direct = np.linalg.norm(spine - root_arr, axis=1)
    budget = (1.0 + STRETCH_MARGIN * eps) * direct

    # candidate plans trade spine coverage against slack reserved for
    # grafting teeth onto shared trunks; keep the lightest valid tree
    best_plan: tuple[float, list] | None = None
    for bend_share in (0.0, 0.25, 0.5, 0.75):
        plan = _comb_plan(root_arr, spine, along, direct, budget, bend_share)
        if plan is not None:
            weight = sum(math.dist(tuple(u), tuple(v)) for u, v in plan)
            if best_plan is None or weight < best_plan[0]:
                best_plan = (weight, plan)
    star_weight = float(direct.sum())
    if best_plan is None or star_weight < best_plan[0] + float(np.sum(hops)):
        for leaf in uniq:
            link(root, leaf)
        tree = SltTree(root, uniq, edges, "star", dist)
        tree.recompute_stats()
        return tree

    for i in range(len(spine) - 1):
        link(spine[i], spine[i + 1])
    for u, v in best_plan[1]:
        link(u, v)
    tree = SltTree(root, uniq, edges, "dyadic", dist)
    tree.recompute_stats()
    return tree


def _comb_plan(root_arr: np.ndarray, spine: np.ndarray, along: np.ndarray,
               direct: np.ndarray, budget: np.ndarray,
               bend_share: float) -> list | None:
    """Teeth + graft plan; returns tree edges (without the spine) or None."""
    cover = _cover_teeth(direct + bend_share * (budget - direct), along, budget)
    if cover is None:
        return None
    arbor = _Arborescence(root_arr)
    allowed = {t: float(np.min(budget[lo:hi + 1] - np.abs(along[lo:hi + 1] - along[t])))
               for t, lo, hi in cover}
    all_teeth = sorted((t for t, _, _ in cover), key=lambda t: (direct[t], t))
    reach = np.full(len(spine), np.inf)
    for t in all_teeth:
        reach[t] = arbor.attach(spine[t], allowed[t], direct[t])

    # audit every leaf against realized reaches; patch violations with
    # direct teeth (terminates: each pass fixes its worst leaf for good)
    for _ in range(len(spine)):
        best = np.full(len(spine), np.inf)
        for t in all_teeth:
            best = np.minimum(best, reach[t] + np.abs(along - along[t]))
        if not (best > budget).any():
            break
        worst = int(np.argmax(np.where(best > budget, best - budget, -np.inf)))
        reach[worst] = arbor.attach(spine[worst], direct[worst], direct[worst])
        all_teeth.append(worst)
    return arbor.segments()


class _Arborescence:
    """Root-anchored segment tree supporting budgeted cheapest attachment."""

    def __init__(self, root: np.ndarray):
        self.root = root
        # segments as (near endpoint, far endpoint, path length at near end)
        self.segs: list[tuple[np.ndarray, np.ndarray, float]] = []

    def attach(self, target: np.ndarray, budget: float, direct: float) -> float:
        best: tuple[float, float, int, float] | None = None  # (hop, bent, seg idx, frac)
        for i, (a, b, base) in enumerate(self.segs):
            ab = b - a
            seg_len = float(np.linalg.norm(ab))
            if seg_len == 0.0:
                continue
            ta = target - a
            dist_a = float(np.linalg.norm(ta))
            cap = budget - base
            if dist_a == 0.0 or cap < dist_a:
                continue
            cos = float(ta @ ab) / (dist_a * seg_len)
            # farthest point p = a + t*ab/|ab| with base+t+|p->target| <= budget
            den = 2.0 * (cap - dist_a * cos)
            t = seg_len if den <= 0 else min(seg_len, (cap * cap - dist_a * dist_a) / den)
            t = max(0.0, t)
            p = a + (t / seg_len) * ab
            hop = float(np.linalg.norm(target - p))
            bent = base + t + hop
            if bent <= budget + 1e-12 and (best is None or hop < best[0]):
                best = (hop, bent, i, t / seg_len)
        if best is None or best[0] >= direct:
            self.segs.append((self.root, target, 0.0))
            return direct
        hop, bent, i, frac = best
        a, b, base = self.segs[i]
        p = a + frac * (b - a)
        if 0.0 < frac < 1.0:
            self.segs[i] = (a, p, base)
            self.segs.append((p, b, base + float(np.linalg.norm(p - a))))
        self.segs.append((p, target, bent - hop))
        return bent

    def segments(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return [(a, b) for a, b, _ in self.segs if np.linalg.norm(b - a) > 0]


def _cover_teeth(reach: np.ndarray, along: np.ndarray,
                 budget: np.ndarray) -> list[tuple[int, int, int]] | None:
    """Minimum teeth so every leaf i has some tooth t with
    reach[t] + |along[i] - along[t]| <= budget[i]. Interval-cover greedy;
    returns (tooth, covered lo, covered hi) triples."""
    n = len(along)
    # coverage of tooth t over leaves i: reach[t] + |along[i]-along[t]| <= budget[i];
    # taking the contiguous run around t is conservative when budget outgrows slope 1
    lo = np.zeros(n, dtype=np.int64)
    hi = np.zeros(n, dtype=np.int64)
    for t in range(n):
        ok = reach[t] + np.abs(along - along[t]) <= budget
        if not ok[t]:
            lo[t], hi[t] = 1, 0  # covers nothing, not even itself
            continue
        left = t
        while left > 0 and ok[left - 1]:
            left -= 1
        right = t
        while right < n - 1 and ok[right + 1]:
            right += 1
        lo[t], hi[t] = left, right
    teeth: list[tuple[int, int, int]] = []
    need = 0
    while need < n:
        candidates = np.nonzero(lo <= need)[0]
        if len(candidates) == 0:
            return None
        ext = hi[candidates]
        t = int(candidates[int(np.argmax(ext))])
        if hi[t] < need:
            return None
        teeth.append((t, need, int(hi[t])))
        need = int(hi[t]) + 1
    return teeth


def _spine_order(arr: np.ndarray) -> np.ndarray:
    """Order leaves along the patch: by widest axis, then the others."""
    spans = arr.max(axis=0) - arr.min(axis=0)
    keys = np.argsort(spans)[::-1]
    return np.lexsort(tuple(arr[:, k] for k in reversed(keys)))


def _project_to_plane(p: np.ndarray, plane_pts: np.ndarray) -> np.ndarray:
    base = plane_pts[0]
    if len(plane_pts) == 1:
        return base
    span = plane_pts[1:] - base
    basis: list[np.ndarray] = []
    for v in span:
        for b in basis:
            v = v - (v @ b) * b
        n = np.linalg.norm(v)
        if n > 1e-12:
            basis.append(v / n)
    q = p - base
    proj = sum((q @ b) * b for b in basis) if basis else np.zeros_like(q)
    return base + proj


def _plane_distance(p: np.ndarray, plane_pts: np.ndarray) -> float:
    return float(np.linalg.norm(p - _project_to_plane(p, plane_pts)))
