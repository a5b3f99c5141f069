from .graphs import (
    WeightedGraph,
    extend_to_edges,
    graph_sublevel_persistence,
    graph_superlevel_persistence,
    hks,
    jacobi_eigh,
    laplacian_spectrum,
    normalized_laplacian,
    read_graph,
    reflect,
    write_graph,
)
from .rips import PointCloud, SimplexBudgetError, rips_diagrams, rips_h0, rips_h1

__all__ = [
    "PointCloud",
    "SimplexBudgetError",
    "WeightedGraph",
    "extend_to_edges",
    "graph_sublevel_persistence",
    "graph_superlevel_persistence",
    "hks",
    "jacobi_eigh",
    "laplacian_spectrum",
    "normalized_laplacian",
    "read_graph",
    "reflect",
    "rips_diagrams",
    "rips_h0",
    "rips_h1",
    "write_graph",
]
