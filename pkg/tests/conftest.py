import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from stablecomm.graph import UndirectedGraph
from stablecomm.stream import LinkStream, TemporalEdge

import datetime as dt


def random_graph(rng: np.random.Generator, n_max: int = 8, connected_bias: float = 0.5):
    """Random weighted undirected graph with at least one edge."""
    n = int(rng.integers(3, n_max + 1))
    nodes = [f"n{i}" for i in range(n)]
    edges = []
    p = 0.3 + connected_bias * rng.random()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((nodes[i], nodes[j], float(rng.integers(1, 6))))
    if not edges:
        edges.append((nodes[0], nodes[1], 1.0))
    return UndirectedGraph(edges), edges


def random_stream(rng: np.random.Generator, n_nodes: int = 10, n_days: int = 8,
                  p: float = 0.25) -> LinkStream:
    """Random temporal edge stream with at least one edge per stream."""
    nodes = [f"n{i}" for i in range(n_nodes)]
    edges = []
    for t in range(n_days):
        for i in range(n_nodes):
            for j in range(n_nodes):
                if i != j and rng.random() < p:
                    edges.append(TemporalEdge(t, nodes[i], nodes[j], float(rng.integers(1, 6))))
    if not edges:
        edges.append(TemporalEdge(0, nodes[0], nodes[1], 1.0))
    return LinkStream(
        edges=tuple(sorted(edges, key=lambda e: (e.t, e.origin, e.dest))),
        node_universe=frozenset(nodes),
        t_min=0,
        t_max=n_days - 1,
        start_date=dt.date(2021, 2, 1),
    )
