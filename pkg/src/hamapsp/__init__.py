"""All-pairs shortest paths and transitive closure via clustered mixed products."""

from .apsp import (
    ApspConfig,
    ApspResult,
    BridgingSet,
    EdgeClassDigraph,
    VertexWeightedDigraph,
    apsp,
    apsp_bounded_edge_classes,
    extract_long_paths,
    hitting_set,
    transitive_closure,
)
from .bits import BitMatrix, UsageError, diff_positions, hamming_distance, transpose
from .disk import (
    PointSet,
    build_disk_graph,
    density_check,
    generate_dense_points,
    row_tree_from_euclidean_mst,
    symmetric_difference_area,
)
from .mixed import (
    MixedProductResult,
    OrderedPool,
    mixed_left,
    mixed_left_naive,
    mixed_right,
    mixed_right_naive,
)
from .mst import (
    LshParams,
    SpanningTree,
    TraversalPlan,
    approx_mst_lsh,
    compile_traversal,
    euclidean_mst,
    exact_mst,
)
from .oracles import bfs_closure, floyd_warshall_edge_classes, floyd_warshall_vertex_weighted

__all__ = [
    "ApspConfig", "ApspResult", "BitMatrix", "BridgingSet", "EdgeClassDigraph", "LshParams",
    "MixedProductResult", "OrderedPool", "PointSet", "SpanningTree", "TraversalPlan", "UsageError",
    "VertexWeightedDigraph", "apsp", "apsp_bounded_edge_classes", "approx_mst_lsh", "bfs_closure",
    "build_disk_graph", "compile_traversal", "density_check", "diff_positions", "euclidean_mst",
    "exact_mst", "extract_long_paths", "floyd_warshall_edge_classes", "floyd_warshall_vertex_weighted",
    "generate_dense_points", "hamming_distance", "hitting_set", "mixed_left", "mixed_left_naive",
    "mixed_right", "mixed_right_naive", "row_tree_from_euclidean_mst", "symmetric_difference_area",
    "transitive_closure", "transpose",
]

__version__ = "0.1.0"
