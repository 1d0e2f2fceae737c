"""Direction covers of the hemisphere used to bucket edges by orientation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class DirectionCover:
    dim: int
    eps: float
    directions: np.ndarray          # (K, dim) unit vectors, one hemisphere
    covering_radius: float          # audited bound on max angle to nearest direction

    @property
    def count(self) -> int:
        return len(self.directions)

    def angles_to(self, v) -> np.ndarray:
        """Undirected angle from v to every cover direction."""
        v = np.asarray(v, dtype=np.float64)
        v = v / np.linalg.norm(v)
        dots = np.abs(self.directions @ v)
        return np.arccos(np.clip(dots, -1.0, 1.0))

    def nearest(self, v) -> int:
        return int(np.argmin(self.angles_to(v)))


def build_direction_cover(dim: int, eps: float, seed: int = 0) -> DirectionCover:
    """Deterministic set of directions with covering radius <= sqrt(eps)/2.

    2D uses K = max(4, ceil(pi/sqrt(eps))) evenly spaced angles. Higher
    dimensions run farthest-point refinement on the hemisphere until a
    sampled audit reports the target radius.
    """
    if dim < 2:
        raise ValueError("direction cover needs dim >= 2")
    if not (0 < eps < 1):
        raise ValueError("need 0 < eps < 1")
    target = 0.5 * math.sqrt(eps)
    if dim == 2:
        k = max(4, math.ceil(math.pi / math.sqrt(eps)))
        angles = np.arange(k) * math.pi / k
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        return DirectionCover(2, eps, dirs, covering_radius=0.5 * math.pi / k)

    rng = np.random.default_rng(seed)
    dirs = [_canonical(v) for v in np.eye(dim)]
    arr = np.asarray(dirs)
    audit = _hemisphere_samples(rng, dim, 4096)
    while True:
        ang = _min_angles(audit, arr)
        worst = float(ang.max())
        if worst <= target:
            break
        arr = np.vstack([arr, audit[int(np.argmax(ang))]])
    return DirectionCover(dim, eps, arr, covering_radius=worst)


def _canonical(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    for c in v:
        if c != 0.0:
            return v if c > 0 else -v
    raise ValueError("zero vector")


def _hemisphere_samples(rng, dim: int, count: int) -> np.ndarray:
    raw = rng.standard_normal((count, dim))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    flip = raw[:, 0] < 0
    raw[flip] *= -1.0
    return raw


def _min_angles(samples: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    dots = np.abs(samples @ dirs.T)
    return np.arccos(np.clip(dots.max(axis=1), -1.0, 1.0))


def audit_cover(cover: DirectionCover, samples: int = 20000, seed: int = 1) -> float:
    """Sampled covering radius; independent of the construction path."""
    rng = np.random.default_rng(seed)
    pts = _hemisphere_samples(rng, cover.dim, samples)
    return float(_min_angles(pts, cover.directions).max())


def orthonormal_frame(direction: np.ndarray) -> np.ndarray:
    """Rows: the direction followed by a deterministic orthonormal complement."""
    d = np.asarray(direction, dtype=np.float64)
    d = d / np.linalg.norm(d)
    dim = len(d)
    if dim == 2:
        return np.array([d, [-d[1], d[0]]])
    rows = [d]
    # seed Gram-Schmidt with the coordinate axes least aligned with d
    order = np.argsort(np.abs(d))
    for axis in order:
        if len(rows) == dim:
            break
        e = np.zeros(dim)
        e[axis] = 1.0
        for r in rows:
            e = e - (e @ r) * r
        norm = np.linalg.norm(e)
        if norm > 1e-12:
            rows.append(e / norm)
    return np.asarray(rows)
