import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import bitmatrices
from hamapsp import BitMatrix, LshParams, SpanningTree, UsageError, approx_mst_lsh, compile_traversal
from hamapsp import euclidean_mst, exact_mst
from hamapsp.bench import make_clustered_matrix
from hamapsp.mst import build_plan, default_epsilon


def prufer_trees(n):
    """Every labelled tree on ``n`` nodes, as edge lists."""
    if n == 1:
        yield []
        return
    if n == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        degree = [1] * n
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(i for i in range(n) if degree[i] == 1)
            edges.append((leaf, x))
            degree[leaf] -= 1
            degree[x] -= 1
        u, v = (i for i in range(n) if degree[i] == 1)
        edges.append((u, v))
        yield edges


def brute_force_mst_cost(M):
    D = np.array([M.distances_from(i) for i in range(M.rows)])
    return min(sum(D[u, v] for u, v in t) for t in prufer_trees(M.rows))


def kruskal_cost(M):
    g = nx.Graph()
    g.add_nodes_from(range(M.rows))
    for i in range(M.rows):
        d = M.distances_from(i)
        g.add_weighted_edges_from((i, j, int(d[j])) for j in range(i + 1, M.rows))
    return sum(d["weight"] for *_, d in nx.minimum_spanning_edges(g, algorithm="kruskal", data=True))


@pytest.mark.parametrize("n", range(1, 7))
def test_prufer_enumeration_counts(n):
    assert sum(1 for _ in prufer_trees(n)) == n ** max(n - 2, 0)


def test_exact_mst_examples():
    assert exact_mst(BitMatrix.from_strings(["0101"] * 3)).cost == 0
    T = exact_mst(BitMatrix.from_strings(["0000", "0001", "0011"]))
    assert T.cost == 2
    assert sorted((min(u, v), max(u, v)) for u, v, _ in T.edges) == [(0, 1), (1, 2)]


def test_exact_mst_matches_kruskal_on_random_32(rng):
    for _ in range(5):
        M = BitMatrix.random(32, 32, 0.5, rng)
        T = exact_mst(M)
        T.validate(M)
        assert T.cost == kruskal_cost(M)


@given(bitmatrices(max_rows=6, max_cols=20))
def test_exact_mst_is_minimum_over_all_trees(M):
    assert exact_mst(M).cost == brute_force_mst_cost(M)


def test_empty_matrix_rejected():
    with pytest.raises(UsageError):
        exact_mst(BitMatrix.zeros(0, 4))


def test_tree_validation_catches_bad_trees():
    M = BitMatrix.from_strings(["00", "01", "11"])
    with pytest.raises(AssertionError, match="cycle"):
        SpanningTree.from_edges(3, [(0, 1, 1), (0, 1, 1)]).validate(M)
    with pytest.raises(AssertionError, match="Hamming"):
        SpanningTree.from_edges(3, [(0, 1, 1), (1, 2, 5)]).validate(M)
    with pytest.raises(AssertionError, match="edge count"):
        SpanningTree.from_edges(3, [(0, 1, 1)]).validate(M)


def test_lsh_examples():
    same = BitMatrix.from_strings(["1010"] * 5)
    assert approx_mst_lsh(same).cost == 0
    M = BitMatrix.from_strings(["0000", "0001", "0011"])
    assert approx_mst_lsh(M, LshParams.default(3, 4, epsilon=1, seed=0, tables=20)).cost == 2


def test_lsh_clustered_within_factor_two_at_default_seed():
    M = make_clustered_matrix(256, 4, 2, 0)
    exact = exact_mst(M).cost
    T = approx_mst_lsh(M, LshParams.default(256, 256, epsilon=1, seed=0))
    T.validate(M)
    assert exact <= T.cost <= 2 * exact


@given(bitmatrices(max_rows=30, max_cols=80), st.integers(0, 1000))
def test_lsh_is_valid_tree_never_below_exact(M, seed):
    T = approx_mst_lsh(M, LshParams.default(M.rows, M.cols, seed=seed))
    T.validate(M)
    assert T.cost >= exact_mst(M).cost


def test_lsh_is_deterministic_per_seed(rng):
    M = BitMatrix.random(60, 50, 0.4, rng)
    p = LshParams.default(60, 50, seed=7)
    assert approx_mst_lsh(M, p) == approx_mst_lsh(M, p)


def test_lsh_params_validation():
    with pytest.raises(UsageError):
        LshParams(epsilon=0, tables=1, bits_per_hash=(1,), scales=(1,), seed=0)
    with pytest.raises(UsageError):
        LshParams(epsilon=1, tables=0, bits_per_hash=(1,), scales=(1,), seed=0)
    with pytest.raises(UsageError):
        LshParams(epsilon=1, tables=1, bits_per_hash=(1, 1), scales=(2, 2), seed=0)
    with pytest.raises(UsageError):
        LshParams(epsilon=1, tables=1, bits_per_hash=(1,), scales=(1, 2), seed=0)
    p = LshParams.default(1000, 64, epsilon=1)
    assert p.tables == math.ceil(3 * math.log(1000))
    assert p.scales[0] == 1 and p.scales[-1] == 64
    assert p.bits_per_hash == tuple(min(64, math.ceil(64 / (s + 1))) for s in p.scales)


def test_default_epsilon():
    assert default_epsilon(2) == 1
    assert default_epsilon(1024) == 9


@pytest.mark.parametrize("pts,cost", [
    ([(0, 0), (0.5, 0)], 0.5),
    ([(0, 0), (1, 0), (0, 1), (1, 1)], 3.0),
    ([(0, 0), (0.1, 0), (0.3, 0)], 0.3),
])
def test_euclidean_mst_examples(pts, cost):
    T = euclidean_mst(np.array(pts, dtype=float))
    assert T.cost == pytest.approx(cost, abs=1e-12)
    assert len(T.edges) == len(pts) - 1


def test_euclidean_mst_collinear_edges():
    T = euclidean_mst(np.array([(0, 0), (0.1, 0), (0.3, 0)], dtype=float))
    assert sorted((min(u, v), max(u, v)) for u, v, _ in T.edges) == [(0, 1), (1, 2)]


def test_euclidean_mst_matches_networkx(rng):
    pts = rng.random((40, 2))
    g = nx.Graph()
    for i, j in itertools.combinations(range(40), 2):
        g.add_edge(i, j, weight=float(np.hypot(*(pts[i] - pts[j]))))
    ref = sum(d["weight"] for *_, d in nx.minimum_spanning_edges(g, data=True))
    assert euclidean_mst(pts).cost == pytest.approx(ref, rel=1e-12)


def check_plan(plan, tree, M):
    steps = plan.steps
    assert plan.start == 0
    for a, b in zip(steps, steps[1:]):
        assert a.v == b.u
    if steps:
        assert steps[0].u == plan.start
    visited = {plan.start} | {s.v for s in steps}
    assert visited == set(range(M.rows))
    uses = {}
    for s in steps:
        key = (min(s.u, s.v), max(s.u, s.v))
        uses[key] = uses.get(key, 0) + 1
    tree_edges = {(min(u, v), max(u, v)) for u, v, _ in tree.edges}
    assert set(uses) <= tree_edges and max(uses.values(), default=0) <= 2
    assert plan.diff_total <= 2 * tree.cost
    for row, bits in plan.replay().items():
        assert np.array_equal(bits, np.flatnonzero(M.row(row)))


def test_compile_examples():
    single = BitMatrix.from_strings(["0110"])
    plan = compile_traversal(exact_mst(single), single)
    assert plan.start == 0 and plan.steps == ()

    path = BitMatrix.from_strings(["00", "01", "11"])
    T = SpanningTree.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    plan = compile_traversal(T, path)
    assert [(s.u, s.v) for s in plan.steps[:2]] == [(0, 1), (1, 2)]
    assert plan.diff_total <= 4
    check_plan(plan, T, path)

    star = BitMatrix.from_strings(["0000", "1000", "0100", "0010", "0001"])
    T = SpanningTree.from_edges(5, [(0, k, 1) for k in range(1, 5)])
    plan = compile_traversal(T, star)
    edges = [(min(s.u, s.v), max(s.u, s.v)) for s in plan.steps]
    assert all(edges.count((0, k)) == 2 for k in range(1, 5))
    check_plan(plan, T, star)


def test_compile_size_mismatch():
    M = BitMatrix.from_strings(["00", "01"])
    with pytest.raises(UsageError):
        compile_traversal(SpanningTree.from_edges(3, [(0, 1, 1), (1, 2, 1)]), M)


@given(bitmatrices(max_rows=25, max_cols=40), st.sampled_from(["exact", "lsh"]))
def test_plan_invariants(M, mode):
    tree, plan = build_plan(M, mode, seed=3)
    check_plan(plan, tree, M)
