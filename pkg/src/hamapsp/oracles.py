"""Cubic and breadth-first reference solvers used to cross-check the pipeline."""

import numpy as np

from .bits import BitMatrix, UsageError


def _floyd_warshall(D1: np.ndarray, w: np.ndarray) -> np.ndarray:
    # the diagonal holds w(v), the weight of the empty path, so paths through
    # their own endpoint are not undercounted; reset to 0 at the end
    D = D1.copy()
    np.fill_diagonal(D, w)
    for k in range(D.shape[0]):
        np.minimum(D, (D[:, k : k + 1] + D[k : k + 1, :]) - w[k], out=D)
    np.fill_diagonal(D, 0.0)
    return D


def floyd_warshall_vertex_weighted(G) -> np.ndarray:
    """Exact distance matrix of a vertex-weighted digraph."""
    w = np.asarray(G.weights, dtype=np.float64)
    adj = G.adjacency.to_bool()
    D1 = np.where(adj, w[:, None] + w[None, :], np.inf)
    return _floyd_warshall(D1, w)


def floyd_warshall_edge_classes(G) -> np.ndarray:
    """Exact distances when each edge also carries its class weight."""
    w = np.asarray(G.weights, dtype=np.float64)
    D1 = np.full((G.n, G.n), np.inf)
    for u, v, c in G.edges:
        D1[u, v] = min(D1[u, v], w[u] + G.class_weights[c] + w[v])
    return _floyd_warshall(D1, w)


def bfs_closure(B: BitMatrix) -> BitMatrix:
    """Reachability matrix by a breadth-first search from every vertex."""
    if B.rows != B.cols:
        raise UsageError(f"closure needs a square matrix, got {B.shape}")
    adj = B.to_bool()
    n = B.rows
    reach = np.zeros((n, n), dtype=bool)
    for s in range(n):
        seen = reach[s]
        seen[s] = True
        frontier = np.array([s])
        while frontier.size:
            nxt = adj[frontier].any(axis=0) & ~seen
            seen |= nxt
            frontier = np.flatnonzero(nxt)
    return BitMatrix.from_dense(reach)
