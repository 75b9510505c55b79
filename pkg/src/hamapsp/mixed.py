"""Mixed (selection) products of a real matrix with a Boolean matrix.

Right product: ``C[i, j] = min{A[i, k] : B[k, j] = 1}``.
Left product:  ``C[i, j] = min{A[k, j] : B[i, k] = 1}``.

The clustered engine keeps, for every output row, a pool of candidate
``(value, k)`` pairs and walks a spanning tree of B's columns (right) or rows
(left), patching the pool with each step's symmetric-difference positions.
Pool work is therefore ``n + sum of step diffs`` per row, which is small when
the columns cluster in Hamming space.  Values are only compared, never added,
so results are bit-exact.

Ties are broken by the smaller index everywhere, which makes the witness
matrix unique and directly comparable with :func:`mixed_right_naive`.
"""

from __future__ import annotations

import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bits import BitMatrix, UsageError, as_scalar_matrix
from .mst import TraversalPlan, build_plan

ABSENT = -1


@dataclass(frozen=True)
class MixedProductResult:
    C: np.ndarray
    W: np.ndarray
    op_count: int
    row_ops: np.ndarray | None = None
    tree_cost: float = 0


class OrderedPool:
    """Indexed binary min-heap of ``(value, index)`` pairs.

    Supports ``insert``, ``delete`` by index and ``min`` in O(log size)
    comparisons; a position map makes delete-by-index possible.
    """

    def __init__(self):
        self._heap: list[tuple[float, int]] = []
        self._pos: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._heap)

    def __contains__(self, index: int) -> bool:
        return index in self._pos

    def min(self) -> tuple[float, int] | None:
        return self._heap[0] if self._heap else None

    def insert(self, value: float, index: int) -> None:
        if index in self._pos:
            raise KeyError(f"index {index} already pooled")
        self._heap.append((value, index))
        self._pos[index] = len(self._heap) - 1
        self._sift_up(len(self._heap) - 1)

    def delete(self, index: int) -> None:
        i = self._pos.pop(index)
        last = self._heap.pop()
        if i == len(self._heap):
            return
        self._heap[i] = last
        self._pos[last[1]] = i
        self._sift_up(i)
        self._sift_down(self._pos[last[1]])

    def _swap(self, i: int, j: int) -> None:
        h = self._heap
        h[i], h[j] = h[j], h[i]
        self._pos[h[i][1]] = i
        self._pos[h[j][1]] = j

    def _sift_up(self, i: int) -> None:
        h = self._heap
        while i > 0:
            parent = (i - 1) >> 1
            if h[i] < h[parent]:
                self._swap(i, parent)
                i = parent
            else:
                break

    def _sift_down(self, i: int) -> None:
        h = self._heap
        n = len(h)
        while True:
            smallest = i
            for child in (2 * i + 1, 2 * i + 2):
                if child < n and h[child] < h[smallest]:
                    smallest = child
            if smallest == i:
                return
            self._swap(i, smallest)
            i = smallest


# ---------------------------------------------------------------------------
# sweep engines: out[r, v] = min{M[r, k] : pattern_v[k] = 1}
# ---------------------------------------------------------------------------


def _sweep_heap(M: np.ndarray, plan: TraversalPlan):
    R = M.shape[0]
    C = np.full((R, plan.node_count), np.inf)
    W = np.full((R, plan.node_count), ABSENT, dtype=np.int64)
    row_ops = np.zeros(R, dtype=np.int64)
    for r in range(R):
        row = M[r]
        pool = OrderedPool()
        ops = 0
        for k in plan.start_bits:
            if row[k] != np.inf:
                pool.insert(row[k], int(k))
                ops += 1
        done = set()

        def record(v):
            if v in done:
                return
            done.add(v)
            top = pool.min()
            if top is not None:
                C[r, v], W[r, v] = top

        record(plan.start)
        for step in plan.steps:
            for k in step.lost:
                if row[k] != np.inf:
                    pool.delete(int(k))
                    ops += 1
            for k in step.gained:
                if row[k] != np.inf:
                    pool.insert(row[k], int(k))
                    ops += 1
            record(step.v)
        row_ops[r] = ops
    return C, W, row_ops


def _ancestor_levels(plan: TraversalPlan, size: int) -> list[list[np.ndarray]]:
    """For each step, the internal tournament nodes to refresh, leaf level first."""
    cached = _LEVEL_CACHE.get(plan)
    if cached is not None and cached[0] == size:
        return cached[1]
    out = []
    for step in plan.steps:
        levels = []
        if step.gained.size or step.lost.size:
            nodes = np.unique((size + np.concatenate([step.gained, step.lost])) >> 1)
            while nodes.size and nodes[0] >= 1:
                levels.append(nodes)
                if nodes[0] == 1:
                    break
                nodes = np.unique(nodes >> 1)
        out.append(levels)
    _LEVEL_CACHE[plan] = (size, out)
    return out


_LEVEL_CACHE: "weakref.WeakKeyDictionary[TraversalPlan, tuple]" = weakref.WeakKeyDictionary()


def _sweep_batched(M: np.ndarray, plan: TraversalPlan):
    """All rows at once over a tournament tree of the index universe.

    Leaf ``size + k`` holds ``M[:, k]`` while ``k`` is pooled and ``+inf``
    otherwise.  An internal node keeps its left child on ties, and left
    subtrees only contain smaller indices, so the root is the
    lexicographically smallest ``(value, k)``.  Storage is node-major so a
    tree node's values for all rows sit in one contiguous row.
    """
    R, width = M.shape
    size = 1 << max(0, (width - 1).bit_length())
    Mt = np.ascontiguousarray(M.T)
    val = np.full((2 * size, R), np.inf)
    idx = np.full((2 * size, R), ABSENT, dtype=np.int64)
    finite = np.isfinite(Mt)
    C = np.full((plan.node_count, R), np.inf)
    W = np.full((plan.node_count, R), ABSENT, dtype=np.int64)
    recorded = np.zeros(plan.node_count, dtype=bool)

    def pull(nodes: np.ndarray) -> None:
        lv, rv = val[2 * nodes], val[2 * nodes + 1]
        take_right = rv < lv
        val[nodes] = np.where(take_right, rv, lv)
        idx[nodes] = np.where(take_right, idx[2 * nodes + 1], idx[2 * nodes])

    def record(v: int) -> None:
        if recorded[v]:
            return
        recorded[v] = True
        C[v] = val[1]
        W[v] = np.where(np.isfinite(val[1]), idx[1], ABSENT)

    start = plan.start_bits
    val[size + start] = Mt[start]
    idx[size + start] = start[:, None]
    row_ops = finite[start].sum(axis=0, dtype=np.int64)
    level = size // 2
    while level >= 1:
        pull(np.arange(level, 2 * level))
        level //= 2
    record(plan.start)

    for step, levels in zip(plan.steps, _ancestor_levels(plan, size)):
        gained, lost = step.gained, step.lost
        if gained.size or lost.size:
            val[size + lost] = np.inf
            idx[size + lost] = ABSENT
            val[size + gained] = Mt[gained]
            idx[size + gained] = gained[:, None]
            row_ops += finite[lost].sum(axis=0) + finite[gained].sum(axis=0)
            for nodes in levels:
                pull(nodes)
        record(step.v)
    return C.T, W.T, row_ops


_ENGINES = {"batched": _sweep_batched, "heap": _sweep_heap}


def _sweep(M: np.ndarray, plan: TraversalPlan, engine: str, threads: int):
    try:
        run = _ENGINES[engine]
    except KeyError:
        raise UsageError(f"unknown engine {engine!r}") from None
    R = M.shape[0]
    if R == 0:
        return (np.full((0, plan.node_count), np.inf),
                np.full((0, plan.node_count), ABSENT, dtype=np.int64),
                np.zeros(0, dtype=np.int64))
    if threads <= 1 or R < 2:
        return run(M, plan)
    # row sweeps are independent; blocks are stitched back in order
    bounds = np.linspace(0, R, min(threads, R) + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda ab: run(M[ab[0]:ab[1]], plan), zip(bounds[:-1], bounds[1:])))
    return tuple(np.concatenate(p, axis=0) for p in zip(*parts))


def _check_plan(plan: TraversalPlan, pattern: BitMatrix) -> None:
    if plan.node_count != pattern.rows or plan.width != pattern.cols:
        raise UsageError(
            f"plan is over {plan.node_count} vectors of width {plan.width}, "
            f"expected {pattern.rows} of width {pattern.cols}"
        )
    if not np.array_equal(plan.start_bits, np.flatnonzero(pattern.row(plan.start))):
        raise UsageError("plan start row does not match the Boolean matrix")


def mixed_right(A, B: BitMatrix, plan: TraversalPlan | None = None, *, mst: str = "exact",
                seed: int = 0, engine: str = "batched", threads: int = 1) -> MixedProductResult:
    """Right mixed product of ``A`` and ``B`` with its witness matrix.

    ``plan`` walks the columns of ``B`` (rows of ``B.T``); when omitted it is
    built with the ``mst`` tree builder.
    """
    A = as_scalar_matrix(A)
    if A.shape[1] != B.rows:
        raise UsageError(f"A is {A.shape}, B is {B.shape}: inner dimensions differ")
    Bt = B.transpose()
    if plan is None:
        _, plan = build_plan(Bt, mst, seed=seed)
    _check_plan(plan, Bt)
    C, W, row_ops = _sweep(A, plan, engine, threads)
    return MixedProductResult(C, W, int(row_ops.sum()), row_ops, plan.tree_cost)


def mixed_left(B: BitMatrix, A, plan: TraversalPlan | None = None, *, mst: str = "exact",
               seed: int = 0, engine: str = "batched", threads: int = 1) -> MixedProductResult:
    """Left mixed product of ``B`` and ``A``; ``plan`` walks the rows of ``B``.

    ``row_ops`` is indexed by the column of ``A`` whose sweep produced it.
    """
    A = as_scalar_matrix(A)
    if B.cols != A.shape[0]:
        raise UsageError(f"B is {B.shape}, A is {A.shape}: inner dimensions differ")
    if plan is None:
        _, plan = build_plan(B, mst, seed=seed)
    _check_plan(plan, B)
    C, W, row_ops = _sweep(np.ascontiguousarray(A.T), plan, engine, threads)
    return MixedProductResult(np.ascontiguousarray(C.T), np.ascontiguousarray(W.T),
                              int(row_ops.sum()), row_ops, plan.tree_cost)


def predict_op_count(A, plan: TraversalPlan) -> np.ndarray:
    """Per-row pool operations a sweep of ``A`` along ``plan`` will perform.

    Every pooled position costs one operation per appearance in the start
    pool or in a step diff, provided its value is finite.
    """
    A = np.asarray(A, dtype=np.float64)
    touches = np.zeros(plan.width, dtype=np.int64)
    np.add.at(touches, plan.start_bits, 1)
    for step in plan.steps:
        np.add.at(touches, step.gained, 1)
        np.add.at(touches, step.lost, 1)
    return np.isfinite(A).astype(np.int64) @ touches


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def mixed_right_naive(A, B: BitMatrix) -> MixedProductResult:
    """Direct evaluation of every entry; first minimal ``k`` is the witness."""
    A = as_scalar_matrix(A)
    if A.shape[1] != B.rows:
        raise UsageError(f"A is {A.shape}, B is {B.shape}: inner dimensions differ")
    mask = B.to_bool()
    C = np.full((A.shape[0], B.cols), np.inf)
    W = np.full((A.shape[0], B.cols), ABSENT, dtype=np.int64)
    for j in range(B.cols):
        cand = np.where(mask[:, j][None, :], A, np.inf)
        if cand.shape[1] == 0:
            continue
        k = np.argmin(cand, axis=1)
        best = cand[np.arange(A.shape[0]), k]
        C[:, j] = best
        W[:, j] = np.where(np.isfinite(best), k, ABSENT)
    return MixedProductResult(C, W, 0)


def mixed_left_naive(B: BitMatrix, A) -> MixedProductResult:
    A = as_scalar_matrix(A)
    if B.cols != A.shape[0]:
        raise UsageError(f"B is {B.shape}, A is {A.shape}: inner dimensions differ")
    res = mixed_right_naive(A.T, B.transpose())
    return MixedProductResult(np.ascontiguousarray(res.C.T), np.ascontiguousarray(res.W.T), 0)
