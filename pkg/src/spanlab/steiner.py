"""Two-stage online Steiner spanner: quadtree primary layer plus per-bucket
backbones (unit grids and shallow-light trees) joined by connectors.

Every new primary edge is normalized to the dyadic level where its length
falls in (eps^-1/2, eps^-1] cell units, then filed into buckets keyed by
(level, direction, rectangle). The rectangle lattice per direction uses
boxes of 4*eps^-1 by eps^-1/2 cell units with half-box strides, so any
normalized edge within the direction cover's angular radius fits some box.
The first edge of a bucket pays for the backbone; later edges only add
connectors from their endpoints to the surrounding grid cell corners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .directions import DirectionCover, build_direction_cover, orthonormal_frame
from .geometry import Metric
from .graph import INPUT, STEINER, SpannerGraph
from .quadtree import AnnulusRule, QuadtreeSpanner
from .slt import SltTree, build_slt


class BucketKey(NamedTuple):
    level: int
    direction: int
    cell: tuple[int, ...]


@dataclass
class BucketGeometry:
    """Backbone dimensions in cell units, shared by every bucket of a run."""

    eps: float
    dim: int
    cross_cells: int          # rectangle width per cross axis (even)
    slabs: int                # number of cross-section slabs
    root_offset: int          # SLT root distance from its slab face

    @classmethod
    def for_eps(cls, eps: float, dim: int) -> "BucketGeometry":
        cross = 2 * math.ceil(0.5 * eps ** -0.5)
        slabs = math.ceil(4.0 / eps / cross)
        return cls(eps, dim, cross, slabs, math.ceil(1.0 / eps))

    @property
    def length_cells(self) -> int:
        return self.slabs * self.cross_cells

    @property
    def along_stride(self) -> float:
        return self.length_cells / 2.0

    @property
    def cross_stride(self) -> float:
        return self.cross_cells / 2.0

    def grid_vertex_count(self) -> int:
        return (self.length_cells + 1) * (self.cross_cells + 1) ** (self.dim - 1)

    def grid_edge_count(self) -> int:
        n, w, d = self.length_cells, self.cross_cells, self.dim
        total = n * (w + 1) ** (d - 1)
        for axis in range(1, d):
            total += (n + 1) * w * (w + 1) ** (d - 2)
        return total

    def grid_weight_cells(self) -> float:
        return float(self.grid_edge_count())


@dataclass
class Backbone:
    key: BucketKey
    grid_weight: float = 0.0
    slt_weight: float = 0.0
    connector_weight: float = 0.0
    edge_count: int = 0
    member_edges: int = 0
    trees: list[SltTree] = field(default_factory=list)

    @property
    def backbone_weight(self) -> float:
        return self.grid_weight + self.slt_weight


class SteinerSpanner:
    def __init__(self, eps: float, dim: int, rule: AnnulusRule | None = None,
                 base_scale: float = 1.0, slt_style: str = "dyadic"):
        if dim < 2:
            raise ValueError("the Steiner spanner needs dim >= 2")
        self.eps = eps
        self.dim = dim
        self.slt_style = slt_style
        self.qt = QuadtreeSpanner(eps, dim, rule, base_scale)
        self.graph = SpannerGraph(dim, Metric.L2)
        self.cover = build_direction_cover(dim, eps)
        self.frames = [orthonormal_frame(d) for d in self.cover.directions]
        self.geometry = BucketGeometry.for_eps(eps, dim)
        self.buckets: dict[BucketKey, Backbone] = {}
        self.g2_of_input: list[int] = []   # arrival index -> G2 vertex id
        self._coord_first: dict[tuple[float, ...], int] = {}
        self._steiner_vid: dict[bytes, int] = {}
        # SLT shape depends only on the root offset from its face (cell units)
        self._slt_cache: dict[float, SltTree] = {}

    # -- vertex plumbing -----------------------------------------------------

    def _steiner_vertex(self, coords: np.ndarray) -> int:
        key = coords.tobytes()
        vid = self._steiner_vid.get(key)
        if vid is None:
            vid = self.graph.add_vertex(tuple(coords), STEINER)
            self._steiner_vid[key] = vid
        return vid

    def _link(self, u: int, v: int) -> int | None:
        if u == v or self.graph.has_edge(u, v):
            return None
        w = math.dist(self.graph.coords_of(u), self.graph.coords_of(v))
        return self.graph._append_edge(u, v, w)

    # -- bucket assignment -----------------------------------------------------

    def bucket_level(self, length: float) -> int:
        if length <= 0:
            raise ValueError("bucket level needs a positive edge length")
        u = self.qt.grid.base_scale
        level = math.floor(math.log2(u / (self.eps * length)))
        # guard against log2 rounding on dyadic boundaries
        while u * 2.0 ** (-level) < self.eps * length:
            level -= 1
        while u * 2.0 ** (-level) >= 2.0 * self.eps * length:
            level += 1
        return level

    def assign_buckets(self, p, q) -> list[BucketKey]:
        """Every (direction, rectangle) bucket containing segment pq, nearest
        direction first. Guaranteed nonempty for covered directions."""
        p = np.asarray(p, dtype=np.float64)
        q = np.asarray(q, dtype=np.float64)
        length = float(np.linalg.norm(q - p))
        level = self.bucket_level(length)
        side = self.qt.grid.side(level)
        angles = self.cover.angles_to(q - p)
        radius = self.cover.covering_radius + 1e-12
        keys: list[tuple[float, BucketKey]] = []
        for di in np.nonzero(angles <= radius)[0]:
            frame = self.frames[di]
            tp = frame @ p / side
            tq = frame @ q / side
            lo = np.minimum(tp, tq)
            hi = np.maximum(tp, tq)
            per_axis: list[list[int]] = []
            for axis in range(self.dim):
                stride = self.geometry.along_stride if axis == 0 else self.geometry.cross_stride
                base = math.floor(lo[axis] / stride)
                cands = [m for m in (base - 1, base)
                         if m * stride <= lo[axis] and hi[axis] < (m + 2) * stride]
                per_axis.append(cands)
            cells: list[tuple[int, ...]] = [()]
            for cands in per_axis:
                cells = [c + (m,) for c in cells for m in cands]
            for cell in cells:
                keys.append((float(angles[di]), BucketKey(level, int(di), cell)))
        if not keys:
            raise RuntimeError(f"no containing bucket for edge of length {length}")
        keys.sort(key=lambda item: (item[0], item[1]))
        return [k for _, k in keys]

    # -- backbone construction ---------------------------------------------------

    def _world(self, level: int, direction: int, frame_coords: np.ndarray) -> np.ndarray:
        side = self.qt.grid.side(level)
        return side * (frame_coords @ self.frames[direction])

    def ensure_backbone(self, key: BucketKey) -> list[int]:
        existing = self.buckets.get(key)
        if existing is not None:
            return []
        bb = Backbone(key)
        self.buckets[key] = bb
        geo = self.geometry
        origin = np.array(
            [key.cell[0] * geo.along_stride]
            + [m * geo.cross_stride for m in key.cell[1:]], dtype=np.float64)
        dims = [geo.length_cells] + [geo.cross_cells] * (self.dim - 1)

        grids = np.meshgrid(*[np.arange(n + 1) for n in dims], indexing="ij")
        pts_frame = np.stack([g.ravel() for g in grids], axis=1).astype(np.float64) + origin
        world = self._world(key.level, key.direction, pts_frame)
        vids = np.array([self._steiner_vertex(w) for w in world], dtype=np.int64)
        shape = tuple(n + 1 for n in dims)
        vgrid = vids.reshape(shape)

        new_edges: list[int] = []

        def add(u: int, v: int) -> float:
            e = self._link(int(u), int(v))
            if e is None:
                return 0.0
            new_edges.append(e)
            bb.edge_count += 1
            return self.graph.edge(e)[2]

        for axis in range(self.dim):
            sl_lo = [slice(None)] * self.dim
            sl_hi = [slice(None)] * self.dim
            sl_lo[axis] = slice(0, -1)
            sl_hi[axis] = slice(1, None)
            for u, v in zip(vgrid[tuple(sl_lo)].ravel(), vgrid[tuple(sl_hi)].ravel()):
                bb.grid_weight += add(u, v)

        # two shallow-light trees per slab, rooted on the median line at
        # root_offset cells beyond either face, leaves on the facing side
        for slab in range(geo.slabs):
            for face_x, root_x in (
                (slab * geo.cross_cells, slab * geo.cross_cells - geo.root_offset),
                ((slab + 1) * geo.cross_cells, (slab + 1) * geo.cross_cells + geo.root_offset),
            ):
                root_x = min(max(root_x, 0), geo.length_cells)
                tree = self._slt_template(float(root_x - face_x))
                bb.trees.append(tree)
                shift = np.concatenate([[face_x], np.zeros(self.dim - 1)]) + origin
                for uf, vf, _ in tree.edges:
                    wu = self._world(key.level, key.direction, np.asarray(uf) + shift)
                    wv = self._world(key.level, key.direction, np.asarray(vf) + shift)
                    bb.slt_weight += add(self._steiner_vertex(wu),
                                         self._steiner_vertex(wv))
        return new_edges

    def _slt_template(self, offset: float) -> SltTree:
        """SLT in face-local cell units: leaves on the x=0 face, root on the
        median at the given signed x offset."""
        tree = self._slt_cache.get(offset)
        if tree is None:
            geo = self.geometry
            median = np.full(self.dim - 1, geo.cross_cells / 2.0)
            cross_axes = np.meshgrid(*[np.arange(geo.cross_cells + 1)] * (self.dim - 1),
                                     indexing="ij")
            cross_pts = np.stack([g.ravel() for g in cross_axes], axis=1)
            root = tuple(np.concatenate([[offset], median]))
            leaves = [tuple(np.concatenate([[0.0], c])) for c in cross_pts.astype(np.float64)]
            tree = build_slt(root, leaves, self.eps, style=self.slt_style)
            self._slt_cache[offset] = tree
        return tree

    def _connectors(self, bb: Backbone, key: BucketKey, coords: np.ndarray,
                    g2_vid: int) -> list[int]:
        geo = self.geometry
        side = self.qt.grid.side(key.level)
        frame = self.frames[key.direction]
        origin = np.array(
            [key.cell[0] * geo.along_stride]
            + [m * geo.cross_stride for m in key.cell[1:]], dtype=np.float64)
        local = frame @ coords / side - origin
        dims = [geo.length_cells] + [geo.cross_cells] * (self.dim - 1)
        cell = [min(max(int(math.floor(c)), 0), n - 1) for c, n in zip(local, dims)]
        out: list[int] = []
        for corner_bits in range(2 ** self.dim):
            corner = np.array([cell[a] + ((corner_bits >> a) & 1) for a in range(self.dim)],
                              dtype=np.float64) + origin
            vid = self._steiner_vertex(self._world(key.level, key.direction, corner))
            e = self._link(g2_vid, vid)
            if e is not None:
                out.append(e)
                bb.connector_weight += self.graph.edge(e)[2]
        return out

    # -- online insertion ----------------------------------------------------------

    def insert(self, coords) -> list[int]:
        coords = tuple(float(c) for c in coords)
        g2 = self.graph.add_vertex(coords, INPUT)
        self.g2_of_input.append(g2)
        first = self._coord_first.get(coords)
        new_edges: list[int] = []
        if first is not None:
            e = self._link(g2, first)
            self.qt.insert(coords)
            return [e] if e is not None else []
        self._coord_first[coords] = g2

        g1_new = self.qt.insert(coords)
        for e1 in g1_new:
            u, v, w, _ = self.qt.graph.edge(e1)
            pu = np.asarray(self.qt.graph.coords_of(u))
            pv = np.asarray(self.qt.graph.coords_of(v))
            key = self.assign_buckets(pu, pv)[0]
            new_edges.extend(self.ensure_backbone(key))
            bb = self.buckets[key]
            bb.member_edges += 1
            # quadtree vertex ids coincide with arrival order, so they index
            # straight into the G2 input map
            new_edges.extend(self._connectors(bb, key, pu, self.g2_of_input[u]))
            new_edges.extend(self._connectors(bb, key, pv, self.g2_of_input[v]))
        return new_edges

    # -- queries ----------------------------------------------------------------

    def query_path(self, i: int, j: int) -> tuple[float, list[tuple[float, ...]]]:
        """Path weight and vertex coordinates between arrival indices i and j."""
        if not (0 <= i < len(self.g2_of_input) and 0 <= j < len(self.g2_of_input)):
            raise KeyError("unknown input index")
        w, path = self.graph.shortest_path(self.g2_of_input[i], self.g2_of_input[j])
        if math.isinf(w):
            raise RuntimeError(f"input points {i} and {j} are disconnected")
        return w, [self.graph.coords_of(v) for v in path]

    def per_bucket_stats(self) -> list[tuple[BucketKey, float, float, int, int]]:
        return [(key, bb.backbone_weight, bb.connector_weight, bb.edge_count, bb.member_edges)
                for key, bb in sorted(self.buckets.items())]


def project_backbone_cost(points, eps: float, dim: int,
                          rule: AnnulusRule | None = None) -> tuple[int, int, int]:
    """Dry census: (bucket count, projected backbone edges, primary edges).

    Runs only the primary quadtree layer and bucket assignment, skipping all
    backbone construction; used to refuse suites whose Steiner layer would
    not fit in desk-scale memory.
    """
    probe = SteinerSpanner(eps, dim, rule)
    qt = QuadtreeSpanner(eps, dim, rule)
    keys: set[BucketKey] = set()
    edges = 0
    for p in points:
        for e in qt.insert(p):
            u, v, _, _ = qt.graph.edge(e)
            keys.add(probe.assign_buckets(
                np.asarray(qt.graph.coords_of(u)), np.asarray(qt.graph.coords_of(v)))[0])
            edges += 1
    per_backbone = probe.geometry.grid_edge_count() + 2 * probe.geometry.slabs * (
        3 * (probe.geometry.cross_cells + 1) ** (dim - 1))
    return len(keys), len(keys) * per_backbone + 2 * edges * 2 ** dim, edges
