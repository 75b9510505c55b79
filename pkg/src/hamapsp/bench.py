"""Benchmark instances and per-run reports.

The clustered suite builds matrices whose rows are noisy copies of a few
templates, so their Hamming MST is cheap; the random suite uses i.i.d. bits
of density 1/2.  Both run the same mixed product and report its pool-operation
count, which is the machine-independent measure of work.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .apsp import ApspConfig, apsp, choose_t
from .bits import BitMatrix
from .mixed import mixed_left, mixed_left_naive, mixed_right, mixed_right_naive
from .mst import compile_traversal, exact_mst
from .oracles import floyd_warshall_vertex_weighted
from .rng import stream


def make_clustered_matrix(n: int, k: int, noise: int, seed: int = 0) -> BitMatrix:
    """``n x n`` matrix whose rows are ``k`` random templates with up to ``noise`` bits flipped.

    Every template is used at least once (given ``k <= n``), so the exact MST
    costs at most ``2 * n * noise + k * n``.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = stream(seed, "bench/clustered")
    templates = rng.random((k, n)) < 0.5
    owner = rng.permutation(np.arange(n) % k)
    dense = templates[owner].copy()
    for i in range(n):
        flips = rng.choice(n, size=int(rng.integers(0, noise + 1)), replace=False)
        dense[i, flips] ^= True
    return BitMatrix.from_dense(dense)


def make_random_matrix(n: int, seed: int = 0, density: float = 0.5) -> BitMatrix:
    return BitMatrix.random(n, n, density, stream(seed, "bench/random"))


@dataclass
class BenchReport:
    instance: str
    n: int
    tree_cost: float
    side: str
    t: int
    op_count: int
    bridging_size: int | None = None
    oracle_ok: bool | None = None
    wall: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def run_instance(name: str, B: BitMatrix, seed: int = 0, *, oracle: bool = False,
                 with_apsp: bool = False) -> BenchReport:
    """Time one mixed product of a random real matrix with ``B`` on its cheaper side."""
    n = B.rows
    wall = {}
    t0 = time.perf_counter()
    Bt = B.transpose()
    right_tree, left_tree = exact_mst(Bt), exact_mst(B)
    side = "right" if right_tree.cost <= left_tree.cost else "left"
    tree, rows = (right_tree, Bt) if side == "right" else (left_tree, B)
    plan = compile_traversal(tree, rows)
    wall["tree"] = time.perf_counter() - t0

    A = stream(seed, f"bench/values/{name}").uniform(0, 10, (n, n))
    t0 = time.perf_counter()
    if side == "right":
        res = mixed_right(A, B, plan)
    else:
        res = mixed_left(B, A, plan)
    wall["mixed"] = time.perf_counter() - t0

    report = BenchReport(name, n, float(tree.cost), side, choose_t(n, tree.cost), res.op_count, wall=wall)
    if oracle:
        t0 = time.perf_counter()
        ref = mixed_right_naive(A, B) if side == "right" else mixed_left_naive(B, A)
        report.oracle_ok = bool(np.array_equal(ref.C, res.C) and np.array_equal(ref.W, res.W))
        wall["oracle"] = time.perf_counter() - t0
    if with_apsp:
        from .apsp import VertexWeightedDigraph

        G = VertexWeightedDigraph(B, stream(seed, f"bench/weights/{name}").uniform(0, 10, n))
        t0 = time.perf_counter()
        out = apsp(G, ApspConfig(mst="exact", seed=seed))
        wall["apsp"] = time.perf_counter() - t0
        report.bridging_size = len(out.bridging)
        if oracle:
            ref = floyd_warshall_vertex_weighted(G)
            report.oracle_ok = bool(report.oracle_ok and distances_agree(out.D, ref))
    return report


def distances_agree(D: np.ndarray, ref: np.ndarray, rel: float = 1e-9) -> bool:
    """Same +inf pattern and every finite entry within ``rel`` relative error."""
    fin = np.isfinite(ref)
    if not np.array_equal(fin, np.isfinite(D)):
        return False
    a, b = D[fin], ref[fin]
    return bool(np.all(np.abs(a - b) <= rel * np.maximum(np.abs(a), np.abs(b))))


def make_disk_matrix(n: int, seed: int = 0, b: int = 4, r: float = 0.1) -> BitMatrix:
    from .disk import build_disk_graph, generate_dense_points

    return build_disk_graph(generate_dense_points(n, b, r, seed)).adjacency


SUITES = {
    "clustered": lambda n, seed: make_clustered_matrix(n, 8, 4, seed),
    "random": lambda n, seed: make_random_matrix(n, seed),
    "disk": lambda n, seed: make_disk_matrix(n, seed),
}


def run_suite(suite: str, sizes=(256, 512, 1024), seed: int = 0, *, oracle: bool = False,
              with_apsp: bool = False):
    make = SUITES[suite]
    for n in sizes:
        yield run_instance(f"{suite}-n{n}", make(n, seed), seed, oracle=oracle, with_apsp=with_apsp)
