"""All-pairs shortest paths for vertex-weighted digraphs.

Pipeline: grow the horizon matrix ``D^i`` (paths of at most ``i`` edges) with
one mixed product per step up to ``t - 1``, backtrack the pairs that improved
at the last step into ``t``-vertex paths, hit them all with a small bridging
set, run Dijkstra into and out of every bridging vertex, and combine.

Distances count the weight of every vertex on the path, both endpoints
included, except that ``D[v, v] = 0``.  Products are fed a copy of ``D``
with ``w(v)`` on the diagonal (the weight of the empty path at ``v``), which
keeps the one-step recurrence exact without touching that convention.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bits import BitMatrix, UsageError
from .mixed import ABSENT, mixed_left, mixed_right
from .mst import SpanningTree, TraversalPlan, build_tree, compile_traversal
from .rng import stream_seed

log = logging.getLogger(__name__)

REL_TOL = 1e-9


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------


def _check_weights(weights, n: int) -> np.ndarray:
    w = np.array(weights, dtype=np.float64).reshape(-1)
    if w.shape != (n,):
        raise UsageError(f"expected {n} vertex weights, got {w.size}")
    if not np.all(np.isfinite(w)) or (w < 0).any():
        raise UsageError("vertex weights must be finite and nonnegative")
    w.flags.writeable = False
    return w


@dataclass(frozen=True)
class VertexWeightedDigraph:
    adjacency: BitMatrix
    weights: np.ndarray

    def __post_init__(self):
        if self.adjacency.rows != self.adjacency.cols:
            raise UsageError("adjacency matrix must be square")
        object.__setattr__(self, "weights", _check_weights(self.weights, self.adjacency.rows))

    @property
    def n(self) -> int:
        return self.adjacency.rows

    @classmethod
    def from_edges(cls, n: int, edges, weights) -> "VertexWeightedDigraph":
        dense = np.zeros((n, n), dtype=np.uint8)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise UsageError(f"edge ({u}, {v}) out of range for n={n}")
            dense[u, v] = 1
        return cls(BitMatrix.from_dense(dense), weights)

    @classmethod
    def random(cls, n: int, density: float, rng: np.random.Generator,
               max_weight: float = 10.0) -> "VertexWeightedDigraph":
        return cls(BitMatrix.random(n, n, density, rng), rng.uniform(0, max_weight, n))

    def edges(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in zip(*np.nonzero(self.adjacency.to_dense()))]

    def reverse(self) -> "VertexWeightedDigraph":
        return VertexWeightedDigraph(self.adjacency.transpose(), self.weights)

    def classes(self) -> list[tuple[BitMatrix, float]]:
        return [(self.adjacency, 0.0)]


@dataclass(frozen=True)
class EdgeClassDigraph:
    """Digraph whose edges each carry one of ``q`` weight classes ``c_1..c_q``."""

    n: int
    weights: np.ndarray
    class_weights: tuple[float, ...]
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", _check_weights(self.weights, self.n))
        cw = tuple(float(c) for c in self.class_weights)
        if not cw:
            raise UsageError("need at least one edge class")
        if any(not math.isfinite(c) or c < 0 for c in cw):
            raise UsageError("class weights must be finite and nonnegative")
        object.__setattr__(self, "class_weights", cw)
        seen: dict[tuple[int, int], int] = {}
        for u, v, c in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise UsageError(f"edge ({u}, {v}) out of range for n={self.n}")
            if not 0 <= c < len(cw):
                raise UsageError(f"edge ({u}, {v}) has unknown class {c}")
            if seen.setdefault((u, v), c) != c:
                raise UsageError(f"edge ({u}, {v}) labelled with classes {seen[(u, v)]} and {c}")
        object.__setattr__(self, "edges", tuple(sorted(set((int(u), int(v), int(c)) for u, v, c in self.edges))))

    @property
    def q(self) -> int:
        return len(self.class_weights)

    def classes(self) -> list[tuple[BitMatrix, float]]:
        dense = np.zeros((self.q, self.n, self.n), dtype=np.uint8)
        for u, v, c in self.edges:
            dense[c, u, v] = 1
        return [(BitMatrix.from_dense(dense[i]), c) for i, c in enumerate(self.class_weights)]

    @property
    def adjacency(self) -> BitMatrix:
        dense = np.zeros((self.n, self.n), dtype=np.uint8)
        for u, v, _ in self.edges:
            dense[u, v] = 1
        return BitMatrix.from_dense(dense)

    @classmethod
    def random(cls, n: int, density: float, class_weights: Sequence[float],
               rng: np.random.Generator, max_weight: float = 10.0) -> "EdgeClassDigraph":
        mask = rng.random((n, n)) < density
        labels = rng.integers(0, len(class_weights), size=(n, n))
        edges = [(int(u), int(v), int(labels[u, v])) for u, v in zip(*np.nonzero(mask))]
        return cls(n, rng.uniform(0, max_weight, n), tuple(class_weights), tuple(edges))


def edge_cost_matrix(classes: list[tuple[BitMatrix, float]], n: int) -> np.ndarray:
    """``cost[x, y]`` = class weight of edge ``x -> y``, ``+inf`` when absent."""
    cost = np.full((n, n), np.inf)
    for A, c in classes:
        cost[A.to_bool()] = c
    return cost


# ---------------------------------------------------------------------------
# horizon iteration
# ---------------------------------------------------------------------------


@dataclass
class HorizonState:
    """``D^i`` with the latest witness ``W`` and improvement level ``L`` per entry.

    ``trail[l]`` keeps ``(sorted flat indices, witnesses)`` for the entries
    strictly improved at level ``l``.  A witness in ``W`` can be overwritten
    by a later improvement of the same entry, and backtracking needs the
    witness that was valid at each level.
    """

    i: int
    D: np.ndarray
    W: np.ndarray
    L: np.ndarray
    trail: dict[int, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    op_count: int = 0

    def witness_at(self, level: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        keys, wit = self.trail[level]
        flat = a * self.D.shape[0] + b
        if keys.size == 0:
            raise AssertionError(f"no entry improved at level {level}")
        pos = np.minimum(np.searchsorted(keys, flat), keys.size - 1)
        if not np.array_equal(keys[pos], flat):
            raise AssertionError(f"backtracking reached an entry not improved at level {level}")
        return wit[pos]


def initial_state(G) -> HorizonState:
    """Horizon-1 state: ``w(v) + c + w(u)`` on edges, 0 on the diagonal."""
    n = G.n
    w = G.weights
    D = np.full((n, n), np.inf)
    for A, c in G.classes():
        cand = np.where(A.to_bool(), (w[:, None] + c) + w[None, :], np.inf)
        np.minimum(D, cand, out=D)
    np.fill_diagonal(D, 0.0)
    L = np.where(np.isfinite(D), 1, 0).astype(np.int64)
    np.fill_diagonal(L, 0)
    return HorizonState(1, D, np.full((n, n), ABSENT, dtype=np.int64), L)


@dataclass(frozen=True)
class ProductPlan:
    """Per-class traversal plans for one product side."""

    side: str
    plans: tuple[TraversalPlan, ...]
    trees: tuple[SpanningTree, ...]

    @property
    def tree_cost(self) -> float:
        return sum(t.cost for t in self.trees)


def horizon_step(state: HorizonState, G, plan: ProductPlan, *, engine: str = "batched",
                 threads: int = 1) -> HorizonState:
    """Advance ``D^i`` to ``D^{i+1}`` with one mixed product per edge class."""
    n = G.n
    if state.i > n - 2:
        raise UsageError(f"horizon {state.i} cannot grow past n - 1 = {n - 1}")
    w = G.weights
    # x = v would only re-derive the edge v -> u, already in D^1; with the
    # 0 diagonal it would also drop w(v).  Mask it out.
    Dw = state.D.copy()
    np.fill_diagonal(Dw, np.inf)
    best = np.full((n, n), np.inf)
    best_w = np.full((n, n), ABSENT, dtype=np.int64)
    ops = 0
    for (A, c), p in zip(G.classes(), plan.plans):
        if plan.side == "right":
            res = mixed_right(Dw, A, p, engine=engine, threads=threads)
            cand = (res.C + c) + w[None, :]
        else:
            res = mixed_left(A, Dw, p, engine=engine, threads=threads)
            cand = (res.C + c) + w[:, None]
        ops += res.op_count
        better = cand < best
        best[better] = cand[better]
        best_w[better] = res.W[better]
    improved = best < state.D
    np.fill_diagonal(improved, False)
    level = state.i + 1
    D = np.where(improved, best, state.D)
    W = np.where(improved, best_w, state.W)
    L = np.where(improved, level, state.L)
    keys = np.flatnonzero(improved)
    trail = dict(state.trail)
    trail[level] = (keys, best_w.reshape(-1)[keys])
    return HorizonState(level, D, W, L, trail, state.op_count + ops)


# ---------------------------------------------------------------------------
# long paths and the bridging set
# ---------------------------------------------------------------------------


def extract_long_paths(state: HorizonState, G, side: str = "right",
                       check: bool = True) -> np.ndarray:
    """Vertex sets of the ``(i)``-edge paths behind entries improved at level ``i``.

    Returns an array of shape ``(N, i + 1)``; row ``r`` lists a path in order
    from its source to its target.  With ``check`` on, every path is verified
    to consist of graph edges, to have distinct vertices, and to weigh exactly
    ``D[v, u]``.
    """
    level = state.i
    n = G.n
    if level < 1:
        return np.empty((0, level + 1), dtype=np.int64)
    vs, us = np.nonzero(state.L == level)
    if vs.size == 0:
        return np.empty((0, level + 1), dtype=np.int64)
    chain = [None] * (level + 1)
    chain[0], chain[level] = vs, us
    if side == "right":
        cur = us
        for lv in range(level, 1, -1):
            cur = state.witness_at(lv, vs, cur)
            chain[lv - 1] = cur
    else:
        cur = vs
        for lv in range(level, 1, -1):
            cur = state.witness_at(lv, cur, us)
            chain[level - lv + 1] = cur
    paths = np.stack(chain, axis=1).astype(np.int64)
    if check:
        _check_paths(paths, state.D[vs, us], G)
    return paths


def _check_paths(paths: np.ndarray, expected: np.ndarray, G) -> None:
    cost = edge_cost_matrix(G.classes(), G.n)
    hops = cost[paths[:, :-1], paths[:, 1:]]
    if not np.isfinite(hops).all():
        raise AssertionError("backtracked chain uses a non-edge")
    srt = np.sort(paths, axis=1)
    if (srt[:, 1:] == srt[:, :-1]).any():
        raise AssertionError("backtracked chain repeats a vertex")
    total = G.weights[paths].sum(axis=1) + hops.sum(axis=1)
    if not np.allclose(total, expected, rtol=REL_TOL, atol=0):
        raise AssertionError("backtracked chain weight differs from its distance entry")


@dataclass(frozen=True)
class BridgingSet:
    vertices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)


def hitting_set(sets, n: int | None = None) -> BridgingSet:
    """Greedy hitting set: repeatedly take the element lying in most unhit sets.

    Ties go to the smaller element.  The result is checked to meet every set.
    """
    sets = [np.unique(np.fromiter(s, dtype=np.int64)) for s in sets]
    if not sets:
        return BridgingSet(())
    sizes = np.array([len(s) for s in sets])
    if (sizes == 0).any():
        raise UsageError("cannot hit an empty set")
    elems = np.concatenate(sets).astype(np.int64)
    owner = np.repeat(np.arange(len(sets)), sizes)
    if n is None:
        n = int(elems.max()) + 1
    alive = np.ones(len(sets), dtype=bool)
    chosen: list[int] = []
    while alive.any():
        live = alive[owner]
        counts = np.bincount(elems[live], minlength=n)
        e = int(np.argmax(counts))
        chosen.append(e)
        alive[owner[elems == e]] = False
    hit = np.zeros(n, dtype=bool)
    hit[chosen] = True
    per_set = np.zeros(len(sets), dtype=bool)
    np.logical_or.at(per_set, owner, hit[elems])
    if not per_set.all():
        raise AssertionError("hitting set misses a set")
    return BridgingSet(tuple(sorted(chosen)))


# ---------------------------------------------------------------------------
# Dijkstra
# ---------------------------------------------------------------------------


def dijkstra_many(cost: np.ndarray, weights: np.ndarray, sources: Sequence[int]) -> np.ndarray:
    """Dense Dijkstra from several sources at once.

    Moving along ``x -> y`` costs ``cost[x, y] + w(y)``; the source starts at
    ``w(source)``.  Row ``s`` of the result is 0 at the source itself.
    """
    n = cost.shape[0]
    sources = np.asarray(sources, dtype=np.int64)
    S = sources.size
    key = np.full((S, n), np.inf)
    rows = np.arange(S)
    key[rows, sources] = weights[sources]
    done = np.zeros((S, n), dtype=bool)
    for _ in range(n):
        masked = np.where(done, np.inf, key)
        j = np.argmin(masked, axis=1)
        kj = masked[rows, j]
        live = np.isfinite(kj)
        if not live.any():
            break
        done[rows[live], j[live]] = True
        cand = (kj[:, None] + cost[j]) + weights[None, :]
        better = (cand < key) & ~done & live[:, None]
        key[better] = cand[better]
    key[rows, sources] = 0.0
    return key


def dijkstra_vertex_weighted(G, source: int, direction: str = "forward") -> np.ndarray:
    """Distances from ``source`` (forward) or to ``source`` (reverse)."""
    cost = edge_cost_matrix(G.classes(), G.n)
    if direction == "reverse":
        cost = cost.T
    elif direction != "forward":
        raise UsageError(f"direction must be 'forward' or 'reverse', not {direction!r}")
    return dijkstra_many(np.ascontiguousarray(cost), G.weights, [source])[0]


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ApspConfig:
    mst: str = "lsh"            # exact | lsh | euclid
    side: str = "auto"          # auto | right | left
    t: int | None = None
    epsilon: float | None = None
    seed: int = 0
    threads: int = 1
    engine: str = "batched"
    points: object = None       # PointSet, required for mst="euclid"
    check_paths: bool = True


@dataclass
class ApspResult:
    D: np.ndarray
    bridging: BridgingSet
    t: int
    side: str
    W: np.ndarray
    L: np.ndarray
    stats: dict = field(default_factory=dict)


def _trees_for(G, side: str, config: ApspConfig) -> tuple[SpanningTree, ...]:
    trees = []
    for i, (A, _) in enumerate(G.classes()):
        rows = A.transpose() if side == "right" else A
        if config.mst == "euclid":
            from .disk import row_tree_from_euclidean_mst

            if config.points is None:
                raise UsageError("mst='euclid' needs the point set")
            trees.append(row_tree_from_euclidean_mst(rows, config.points))
        else:
            seed = stream_seed(config.seed, f"mst/{side}/{i}")
            trees.append(build_tree(rows, config.mst, seed=seed, epsilon=config.epsilon))
    return tuple(trees)


def choose_plan(G, config: ApspConfig) -> tuple[ProductPlan, dict]:
    """Build trees for the requested side(s) and keep the cheaper one.

    Right products walk the columns of each adjacency matrix, left products
    its rows.  Ties favour the right side.
    """
    if config.side not in ("auto", "right", "left"):
        raise UsageError(f"side must be auto, right or left, not {config.side!r}")
    sides = ["right", "left"] if config.side == "auto" else [config.side]
    trees = {s: _trees_for(G, s, config) for s in sides}
    costs = {s: sum(t.cost for t in trees[s]) for s in sides}
    side = min(sides, key=lambda s: (costs[s], s != "right"))
    plans = []
    for (A, _), tree in zip(G.classes(), trees[side]):
        rows = A.transpose() if side == "right" else A
        plans.append(compile_traversal(tree, rows))
    stats = {f"tree_cost_{s}": float(costs[s]) for s in sides}
    return ProductPlan(side, tuple(plans), trees[side]), stats


def choose_t(n: int, tree_cost: float) -> int:
    """``ceil(sqrt(n^3 / T))`` with ``T = n (n + 2 * tree_cost + 1)``, clamped to ``[2, n]``."""
    est = n * (n + 2 * tree_cost + 1)
    return int(min(max(math.ceil(math.sqrt(n ** 3 / est)), 2), n))


def _solve(G, config: ApspConfig) -> ApspResult:
    n = G.n
    w = G.weights
    timings: dict[str, float] = {}
    if n <= 1:
        z = np.zeros((n, n))
        return ApspResult(z, BridgingSet(()), n, "right", np.full((n, n), ABSENT), np.zeros((n, n), int), {"t": n})

    t0 = time.perf_counter()
    plan, stats = choose_plan(G, config)
    timings["trees"] = time.perf_counter() - t0
    t = config.t if config.t is not None else choose_t(n, plan.tree_cost)
    if not 2 <= t <= n:
        raise UsageError(f"t must lie in [2, {n}], got {t}")

    t0 = time.perf_counter()
    state = initial_state(G)
    while state.i < t - 1:
        nxt = horizon_step(state, G, plan, engine=config.engine, threads=config.threads)
        if not len(nxt.trail[nxt.i][0]):
            log.debug("fixpoint reached at horizon %d", state.i)
            state = nxt
            break
        state = nxt
    timings["horizon"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if state.i == t - 1:
        paths = extract_long_paths(state, G, plan.side, check=config.check_paths)
    else:
        paths = np.empty((0, t), dtype=np.int64)
    bridging = hitting_set(paths, n) if len(paths) else BridgingSet(())
    timings["bridging"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    D = state.D.copy()
    if len(bridging):
        B = np.array(bridging.vertices, dtype=np.int64)
        cost = edge_cost_matrix(G.classes(), n)
        fwd, rev = _dijkstra_both(cost, w, B, config.threads)
        D[B, :] = fwd
        D[:, B] = rev.T
        for i, b in enumerate(B):
            via = (rev[i][:, None] + fwd[i][None, :]) - w[b]
            via[b, :] = np.inf
            via[:, b] = np.inf
            np.minimum(D, via, out=D)
        np.fill_diagonal(D, 0.0)
    timings["combine"] = time.perf_counter() - t0

    stats.update(
        t=t,
        side=plan.side,
        tree_cost=float(plan.tree_cost),
        horizon=state.i,
        long_paths=int(len(paths)),
        bridging_size=len(bridging),
        op_count=int(state.op_count),
        timings=timings,
    )
    return ApspResult(D, bridging, t, plan.side, state.W, state.L, stats)


def _dijkstra_both(cost, w, B, threads):
    fwd_cost = np.ascontiguousarray(cost)
    rev_cost = np.ascontiguousarray(cost.T)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            f = pool.submit(dijkstra_many, fwd_cost, w, B)
            r = pool.submit(dijkstra_many, rev_cost, w, B)
            return f.result(), r.result()
    return dijkstra_many(fwd_cost, w, B), dijkstra_many(rev_cost, w, B)


def apsp(G: VertexWeightedDigraph, config: ApspConfig | None = None) -> ApspResult:
    """Distance matrix of a vertex-weighted digraph with nonnegative weights."""
    return _solve(G, config or ApspConfig())


def apsp_bounded_edge_classes(G: EdgeClassDigraph, config: ApspConfig | None = None) -> ApspResult:
    """Like :func:`apsp`, for edges carrying one of a few weight classes.

    Every horizon step runs one mixed product per class.
    """
    return _solve(G, config or ApspConfig())


def transitive_closure(B: BitMatrix, config: ApspConfig | None = None) -> BitMatrix:
    """Reflexive-transitive closure of a square Boolean matrix (zero vertex weights)."""
    if B.rows != B.cols:
        raise UsageError(f"closure needs a square matrix, got {B.shape}")
    G = VertexWeightedDigraph(B, np.zeros(B.rows))
    res = apsp(G, config)
    return BitMatrix.from_dense(np.isfinite(res.D))
