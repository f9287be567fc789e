"""Stable community detection and characterization for temporal mobility networks."""

from .errors import StablecommError, ValidationError
from .graph import UndirectedGraph
from .louvain import (
    KERNEL,
    Partition,
    QualityConfig,
    conductance,
    inverse_conductance,
    louvain,
    modularity,
)
from .stream import (
    LinkStream,
    SnapshotGraph,
    TemporalEdge,
    aggregate_window,
    ingest_edges,
    read_edges_csv,
    symmetrize,
    write_edges_csv,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL",
    "LinkStream",
    "Partition",
    "QualityConfig",
    "SnapshotGraph",
    "StablecommError",
    "TemporalEdge",
    "UndirectedGraph",
    "ValidationError",
    "aggregate_window",
    "conductance",
    "ingest_edges",
    "inverse_conductance",
    "louvain",
    "modularity",
    "read_edges_csv",
    "symmetrize",
    "write_edges_csv",
]
