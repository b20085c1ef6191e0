"""Site-percolation laboratory for d-regular graphs."""

from percolab.errors import PercolabError, RuntimeFailure, ValidationError
from percolab.graph import Graph, VertexPartition, build_graph

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "VertexPartition",
    "build_graph",
    "PercolabError",
    "ValidationError",
    "RuntimeFailure",
]
