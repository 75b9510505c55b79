"""Uniform disk graphs on bounded-density point sets in the unit square.

A point set is ``b``-dense when no cell of the ``g x g`` grid, with
``g = ceil(sqrt(n))``, holds more than ``b`` points.  Two points are adjacent
when their distance is at most ``r``.  For such graphs the Euclidean MST
already gives a cheap spanning tree of the adjacency rows in Hamming space,
so no LSH is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .apsp import VertexWeightedDigraph
from .bits import BitMatrix, UsageError
from .mst import SpanningTree, euclidean_mst
from .rng import stream


@dataclass(frozen=True)
class PointSet:
    xy: np.ndarray
    radius: float
    weights: np.ndarray

    def __post_init__(self):
        xy = np.array(self.xy, dtype=np.float64).reshape(-1, 2)
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        if w.shape[0] != xy.shape[0]:
            raise UsageError("one weight per point")
        if ((xy < 0) | (xy > 1)).any():
            raise UsageError("coordinates must lie in [0, 1]")
        if not 0 < self.radius <= 1:
            raise UsageError("radius must lie in (0, 1]")
        if (w < 0).any() or not np.isfinite(w).all():
            raise UsageError("weights must be finite and nonnegative")
        xy.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "xy", xy)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def n(self) -> int:
        return self.xy.shape[0]


@dataclass(frozen=True)
class DensityProfile:
    grid_side: int
    max_per_cell: int
    histogram: np.ndarray  # grid_side x grid_side occupancy counts


def grid_side(n: int) -> int:
    return max(1, math.isqrt(n - 1) + 1) if n > 0 else 1


def _cell(coord: np.ndarray, g: int) -> np.ndarray:
    # a point on a cell boundary belongs to the lower-index cell
    return np.clip(np.ceil(coord * g).astype(np.int64) - 1, 0, g - 1)


def density_check(P: PointSet) -> DensityProfile:
    g = grid_side(P.n)
    hist = np.zeros((g, g), dtype=np.int64)
    if P.n:
        np.add.at(hist, (_cell(P.xy[:, 0], g), _cell(P.xy[:, 1], g)), 1)
    return DensityProfile(g, int(hist.max()) if P.n else 0, hist)


def generate_dense_points(n: int, b: int, r: float, seed: int = 0) -> PointSet:
    """Uniform points, resampling any that land in a cell already holding ``b``."""
    if n < 1 or b < 1:
        raise UsageError("need n >= 1 and b >= 1")
    g = grid_side(n)
    if b * g * g < n:
        raise UsageError(f"{n} points cannot be {b}-dense on a {g}x{g} grid")
    rng = stream(seed, "disk/points")
    counts = np.zeros((g, g), dtype=np.int64)
    xy = np.empty((n, 2))
    filled = 0
    while filled < n:
        batch = rng.random((max(64, n - filled), 2))
        cx, cy = _cell(batch[:, 0], g), _cell(batch[:, 1], g)
        for p, i, j in zip(batch, cx, cy):
            if counts[i, j] < b:
                counts[i, j] += 1
                xy[filled] = p
                filled += 1
                if filled == n:
                    break
    weights = stream(seed, "disk/weights").random(n)
    return PointSet(xy, r, weights)


def build_disk_graph(P: PointSet) -> VertexWeightedDigraph:
    """Symmetric digraph with an edge each way between points at distance <= r."""
    diff = P.xy[:, None, :] - P.xy[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    adj = d2 <= P.radius * P.radius
    np.fill_diagonal(adj, False)
    return VertexWeightedDigraph(BitMatrix.from_dense(adj), P.weights)


def row_tree_from_euclidean_mst(G, P: PointSet) -> SpanningTree:
    """Spanning tree of the adjacency rows that reuses the Euclidean MST's edges.

    Edge costs are the Hamming distances of the joined rows.  ``G`` may be the
    graph or its adjacency matrix.
    """
    A = G.adjacency if hasattr(G, "adjacency") else G
    if A.rows != P.n:
        raise UsageError(f"graph has {A.rows} vertices, point set has {P.n}")
    euclid = euclidean_mst(P)
    return SpanningTree.from_edges(P.n, ((u, v, A.row_distance(u, v)) for u, v, _ in euclid.edges))


def symmetric_difference_area(r: float, d: float) -> float:
    """Area of the symmetric difference of two radius-``r`` disks ``d`` apart.

    Uses ``4 r^2 asin(d / 2r) + d sqrt(4 r^2 - d^2)``, the same quantity as
    ``2 pi r^2 - 4 r^2 acos(d / 2r) + d sqrt(4 r^2 - d^2)`` but exactly 0 at
    ``d = 0``.
    """
    if r <= 0:
        raise UsageError("radius must be positive")
    if not 0 <= d <= 2 * r:
        raise UsageError(f"distance {d} outside [0, {2 * r}]")
    return 4 * r * r * math.asin(min(1.0, d / (2 * r))) + d * math.sqrt(max(0.0, 4 * r * r - d * d))


def symmetric_difference_area_mc(r: float, d: float, samples: int = 10**7, seed: int = 0) -> float:
    """Stratified Monte Carlo estimate of :func:`symmetric_difference_area`.

    One jittered sample per cell of a ``m x m`` grid laid over the bounding
    box ``[-r, d + r] x [-r, r]``, with ``m = ceil(sqrt(samples))``.
    """
    m = math.isqrt(samples - 1) + 1
    rng = np.random.default_rng(seed)
    width, height = d + 2 * r, 2 * r
    hits = 0
    r2 = r * r
    cols = np.arange(m)
    for start in range(0, m, 256):
        rows = np.arange(start, min(m, start + 256))
        u = (cols[None, :] + rng.random((rows.size, m))) / m
        v = (rows[:, None] + rng.random((rows.size, m))) / m
        x = -r + width * u
        y = -r + height * v
        in1 = x * x + y * y <= r2
        in2 = (x - d) ** 2 + y * y <= r2
        hits += int(np.count_nonzero(in1 ^ in2))
    return width * height * hits / (m * m)


@dataclass(frozen=True)
class DiskRatios:
    """Normalized sizes behind the disk-graph bounds for one point set.

    ``mst_length`` is the Euclidean MST length over ``sqrt(n)``; ``edge`` is
    the worst per-edge ratio of row Hamming distance to
    ``b * r * (dist * n + sqrt(n))``; ``row_tree`` is the row-tree cost over
    ``b * r * n**1.5``.  ``b`` is the observed maximum cell occupancy.
    """

    n: int
    radius: float
    b: int
    mst_length: float
    edge: float
    row_tree: float
    row_tree_cost: int


def disk_ratios(P: PointSet) -> DiskRatios:
    n, r = P.n, P.radius
    b = density_check(P).max_per_cell
    A = build_disk_graph(P).adjacency
    euclid = euclidean_mst(P)
    root = math.sqrt(n)
    worst = 0.0
    total = 0
    for u, v, dist in euclid.edges:
        h = A.row_distance(u, v)
        total += h
        worst = max(worst, h / (b * r * (dist * n + root)))
    return DiskRatios(n, r, b, euclid.cost / root, worst, total / (b * r * n**1.5), total)
