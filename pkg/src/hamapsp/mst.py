"""Spanning trees over matrix rows and the Euler-walk schedules built from them.

Three tree builders share one output type:

* :func:`exact_mst` - Prim over the implicit complete Hamming graph.
* :func:`approx_mst_lsh` - Prim driven by bit-sampling LSH closest-pair
  queries at geometric distance scales.
* :func:`euclidean_mst` - quadratic Prim for planar points.

:func:`compile_traversal` turns a tree into the walk that the mixed-product
engine replays, with the per-edge symmetric-difference positions precomputed.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .bits import BitMatrix, UsageError


@dataclass(frozen=True)
class SpanningTree:
    node_count: int
    edges: tuple[tuple[int, int, float], ...]
    cost: float

    @classmethod
    def from_edges(cls, node_count: int, edges) -> "SpanningTree":
        edges = tuple((int(u), int(v), c) for u, v, c in edges)
        return cls(node_count, edges, sum(e[2] for e in edges))

    def validate(self, rows: BitMatrix | None = None) -> None:
        """Raise ``AssertionError`` unless this is a spanning tree (with exact Hamming costs)."""
        n = self.node_count
        assert len(self.edges) == max(n - 1, 0), "wrong edge count"
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, c in self.edges:
            ru, rv = find(u), find(v)
            assert ru != rv, f"cycle through edge ({u}, {v})"
            parent[ru] = rv
            if rows is not None:
                assert c == rows.row_distance(u, v), f"edge ({u}, {v}) cost {c} is not its Hamming distance"
        assert math.isclose(self.cost, sum(e[2] for e in self.edges)), "cost is not the edge total"

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for nbrs in adj:
            nbrs.sort()
        return adj


# ---------------------------------------------------------------------------
# exact Prim
# ---------------------------------------------------------------------------


def _prim(n: int, distances_from) -> list[tuple[int, int, float]]:
    """Dense Prim from node 0; ``distances_from(i)`` yields a length-n cost vector.

    Ties go to the smaller row index, both when picking the next node and when
    keeping an existing parent on equal cost.
    """
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    in_tree[0] = True
    best_from = distances_from(0).astype(np.float64)
    better = best_from < best
    best[better] = best_from[better]
    parent[better] = 0
    edges = []
    for _ in range(n - 1):
        masked = np.where(in_tree, np.inf, best)
        j = int(np.argmin(masked))
        in_tree[j] = True
        edges.append((int(parent[j]), j, best[j]))
        d = distances_from(j)
        better = (d < best) & ~in_tree
        best[better] = d[better]
        parent[better] = j
    return edges


def exact_mst(rows: BitMatrix) -> SpanningTree:
    """Minimum spanning tree of the rows under Hamming distance."""
    if rows.rows < 1:
        raise UsageError("need at least one row")
    edges = _prim(rows.rows, rows.distances_from)
    return SpanningTree.from_edges(rows.rows, ((u, v, int(c)) for u, v, c in edges))


def euclidean_mst(points) -> SpanningTree:
    """Exact Euclidean MST of planar points by quadratic Prim.

    Accepts an ``(n, 2)`` array or anything with an ``xy`` attribute.
    """
    xy = np.asarray(getattr(points, "xy", points), dtype=np.float64)
    if xy.ndim != 2 or xy.shape[0] < 1:
        raise UsageError("need at least one point")

    def dist(i):
        return np.hypot(xy[:, 0] - xy[i, 0], xy[:, 1] - xy[i, 1])

    edges = _prim(xy.shape[0], dist)
    return SpanningTree.from_edges(xy.shape[0], ((u, v, float(c)) for u, v, c in edges))


# ---------------------------------------------------------------------------
# LSH-driven approximate Prim
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LshParams:
    epsilon: float
    tables: int
    bits_per_hash: tuple[int, ...]
    scales: tuple[int, ...]
    seed: int = 0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise UsageError("epsilon must be positive")
        if self.tables < 1:
            raise UsageError("need at least one table")
        if len(self.scales) != len(self.bits_per_hash) or not self.scales:
            raise UsageError("one bits_per_hash entry per scale")
        if any(k < 1 for k in self.bits_per_hash):
            raise UsageError("bits_per_hash must be >= 1")
        if any(b <= a for a, b in zip(self.scales, self.scales[1:])):
            raise UsageError("scales must be strictly increasing")

    @classmethod
    def default(cls, n: int, cols: int, epsilon: float | None = None, seed: int = 0,
                tables: int | None = None) -> "LshParams":
        if epsilon is None:
            epsilon = default_epsilon(n)
        cols = max(cols, 1)
        scales = [1]
        while scales[-1] < cols:
            scales.append(min(cols, max(scales[-1] + 1, math.floor(scales[-1] * (1 + epsilon)))))
        bits = tuple(min(cols, math.ceil(cols / (s + 1))) for s in scales)
        if tables is None:
            tables = max(1, math.ceil(3 * math.log(max(n, 2))))
        return cls(float(epsilon), tables, bits, tuple(scales), seed)


def default_epsilon(n: int) -> float:
    return float(max(1, math.ceil(math.log2(max(n, 2))) - 1))


class _ScaleIndex:
    """``tables`` bit-sampling hash tables for one distance scale, with lazy deletion."""

    def __init__(self, dense: np.ndarray, k: int, tables: int, rng: np.random.Generator):
        cols = dense.shape[1]
        self.keys: list[list[bytes]] = []
        self.buckets: list[dict[bytes, list[int]]] = []
        for _ in range(tables):
            positions = rng.integers(0, cols, size=k)
            packed = np.packbits(dense[:, positions], axis=1)
            keys = [row.tobytes() for row in packed]
            table: dict[bytes, list[int]] = {}
            for i, key in enumerate(keys):
                table.setdefault(key, []).append(i)
            self.keys.append(keys)
            self.buckets.append(table)

    def candidates(self, q: int, in_tree: np.ndarray) -> set[int]:
        found: set[int] = set()
        for keys, table in zip(self.keys, self.buckets):
            key = keys[q]
            bucket = table.get(key)
            if not bucket:
                continue
            live = [i for i in bucket if not in_tree[i]]
            if len(live) != len(bucket):
                table[key] = live
            found.update(live)
        return found


def approx_mst_lsh(rows: BitMatrix, params: LshParams | None = None) -> SpanningTree:
    """Approximate Hamming MST by simulating Prim with LSH nearest-neighbour queries.

    Every tree node keeps its best known non-tree candidate on a heap.  A
    candidate found to have joined the tree in the meantime is refreshed by
    re-querying.  A query probes scales from small to large and stops at the
    first scale whose buckets hold a live row.  If every query comes back
    empty, the next non-tree row is attached to its exact nearest tree node,
    so the result is always a spanning tree.
    """
    n = rows.rows
    if n < 1:
        raise UsageError("need at least one row")
    if params is None:
        params = LshParams.default(n, rows.cols)
    if n == 1:
        return SpanningTree(1, (), 0)
    dense = rows.to_dense()
    rng = np.random.default_rng(params.seed)
    index = [_ScaleIndex(dense, k, params.tables, rng) for k in params.bits_per_hash]
    in_tree = np.zeros(n, dtype=bool)
    heap: list[tuple[int, int, int]] = []

    def query(q: int) -> None:
        for scale in index:
            found = scale.candidates(q, in_tree)
            found.discard(q)
            if found:
                cand = np.fromiter(sorted(found), dtype=np.int64)
                d = np.bitwise_count(rows.words[cand] ^ rows.words[q]).sum(axis=1)
                best = int(np.argmin(d))
                heapq.heappush(heap, (int(d[best]), q, int(cand[best])))
                return

    edges: list[tuple[int, int, int]] = []

    def attach(u: int, v: int, d: int) -> None:
        in_tree[v] = True
        edges.append((u, v, d))
        query(v)

    in_tree[0] = True
    query(0)
    while len(edges) < n - 1:
        if not heap:
            v = int(np.flatnonzero(~in_tree)[0])
            d = np.where(in_tree, rows.distances_from(v), np.iinfo(np.int64).max)
            u = int(np.argmin(d))
            attach(u, v, int(d[u]))
            continue
        d, u, v = heapq.heappop(heap)
        if in_tree[v]:
            query(u)
            continue
        attach(u, v, d)
        query(u)
    return SpanningTree.from_edges(n, edges)


# ---------------------------------------------------------------------------
# traversal schedule
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Step:
    """Move from row ``u`` to row ``v``.

    ``gained`` holds positions set in ``v`` but not ``u``; ``lost`` the reverse.
    """

    u: int
    v: int
    gained: np.ndarray
    lost: np.ndarray


@dataclass(frozen=True, eq=False)
class TraversalPlan:
    node_count: int
    start: int
    steps: tuple[Step, ...]
    tree_cost: float = 0
    width: int = 0
    start_bits: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def diff_total(self) -> int:
        return sum(s.gained.size + s.lost.size for s in self.steps)

    def replay(self) -> dict[int, np.ndarray]:
        """Rebuild every visited row's 1-positions from the start row and the diffs."""
        current = set(int(i) for i in self.start_bits)
        seen = {self.start: np.array(sorted(current), dtype=np.int64)}
        for s in self.steps:
            current.difference_update(int(i) for i in s.lost)
            current.update(int(i) for i in s.gained)
            seen[s.v] = np.array(sorted(current), dtype=np.int64)
        return seen


def compile_traversal(tree: SpanningTree, rows: BitMatrix) -> TraversalPlan:
    """Depth-first Euler walk of ``tree`` from row 0 with per-step diff sets.

    Each tree edge is walked down once and back up once.  Its two diff sets
    are computed once and swapped on the way back.
    """
    if tree.node_count != rows.rows:
        raise UsageError(f"tree spans {tree.node_count} nodes but matrix has {rows.rows} rows")
    n = rows.rows
    if n == 0:
        raise UsageError("empty matrix")
    adj = tree.adjacency()
    steps: list[Step] = []
    steps_by_edge: dict[tuple[int, int], Step] = {}
    visited = np.zeros(n, dtype=bool)
    visited[0] = True
    stack = [(0, iter(adj[0]))]
    while stack:
        node, children = stack[-1]
        child = next(children, None)
        if child is None:
            stack.pop()
            if stack:
                down = steps_by_edge.pop((stack[-1][0], node))
                steps.append(Step(node, stack[-1][0], down.lost, down.gained))
            continue
        if visited[child]:
            continue
        visited[child] = True
        gained, lost = rows.row_diff(child, node)
        step = Step(node, child, gained, lost)
        steps.append(step)
        steps_by_edge[(node, child)] = step
        stack.append((child, iter(adj[child])))
    if not visited.all():
        raise UsageError("tree does not span all rows")
    return TraversalPlan(
        node_count=n,
        start=0,
        steps=tuple(steps),
        tree_cost=tree.cost,
        width=rows.cols,
        start_bits=np.flatnonzero(rows.row(0)),
    )



def build_tree(rows: BitMatrix, mode: str = "exact", *, seed: int = 0,
               epsilon: float | None = None) -> SpanningTree:
    if mode == "exact":
        return exact_mst(rows)
    if mode == "lsh":
        return approx_mst_lsh(rows, LshParams.default(rows.rows, rows.cols, epsilon, seed))
    raise UsageError(f"unknown tree mode {mode!r} (expected 'exact' or 'lsh')")


def build_plan(rows: BitMatrix, mode: str = "exact", *, seed: int = 0,
               epsilon: float | None = None) -> tuple[SpanningTree, TraversalPlan]:
    tree = build_tree(rows, mode, seed=seed, epsilon=epsilon)
    return tree, compile_traversal(tree, rows)
