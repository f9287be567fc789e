"""Undirected weighted graph used by the community detection routines.

Convention: the adjacency matrix A stores each off-diagonal edge twice
(A[i][j] == A[j][i]) and a self-loop once (A[i][i]).  The weighted degree of
a node is its matrix row sum, so a self-loop contributes once to the degree
and once to ``total_weight`` (the full matrix sum, i.e. "2m" in modularity).
"""

from __future__ import annotations

from typing import Hashable, Iterable, Iterator

import numpy as np

from .errors import ValidationError

Node = Hashable


class UndirectedGraph:
    """Immutable undirected weighted graph with optional self-loops."""

    def __init__(self, weighted_edges: Iterable[tuple[Node, Node, float]]):
        adj: dict[Node, dict[Node, float]] = {}
        loops: dict[Node, float] = {}
        for u, v, w in weighted_edges:
            w = float(w)
            if w <= 0:
                raise ValidationError(f"non-positive edge weight {w} on ({u}, {v})")
            if u == v:
                loops[u] = loops.get(u, 0.0) + w
                adj.setdefault(u, {})
            else:
                adj.setdefault(u, {})[v] = adj.setdefault(u, {}).get(v, 0.0) + w
                adj.setdefault(v, {})[u] = adj.setdefault(v, {}).get(u, 0.0) + w
        self.nodes: tuple[Node, ...] = tuple(sorted(adj, key=str))
        self._index: dict[Node, int] = {u: i for i, u in enumerate(self.nodes)}
        self._adj = [adj[u] for u in self.nodes]
        self._loops = np.array([loops.get(u, 0.0) for u in self.nodes])
        self._degrees = np.array(
            [sum(self._adj[i].values()) + self._loops[i] for i in range(len(self.nodes))]
        )

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, node: Node) -> bool:
        return node in self._index

    def index(self, node: Node) -> int:
        return self._index[node]

    def degree(self, node: Node) -> float:
        return float(self._degrees[self._index[node]])

    def self_loop(self, node: Node) -> float:
        return float(self._loops[self._index[node]])

    def neighbors(self, node: Node) -> Iterator[tuple[Node, float]]:
        return iter(self._adj[self._index[node]].items())

    def weight(self, u: Node, v: Node) -> float:
        if u == v:
            return self.self_loop(u)
        return self._adj[self._index[u]].get(v, 0.0)

    @property
    def total_weight(self) -> float:
        """Full adjacency-matrix sum (off-diagonal edges counted twice)."""
        return float(self._degrees.sum())

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Return (indptr, indices, weights, loops) over node indices.

        Self-loops are excluded from the CSR part and returned separately.
        Neighbor lists are sorted by node index for reproducibility.
        """
        n = len(self.nodes)
        indptr = np.zeros(n + 1, dtype=np.int64)
        indices: list[int] = []
        weights: list[float] = []
        for i in range(n):
            row = sorted((self._index[v], w) for v, w in self._adj[i].items())
            indptr[i + 1] = indptr[i] + len(row)
            indices.extend(j for j, _ in row)
            weights.extend(w for _, w in row)
        return (
            indptr,
            np.array(indices, dtype=np.int64),
            np.array(weights, dtype=np.float64),
            self._loops.copy(),
        )

    def dense(self) -> np.ndarray:
        """Dense adjacency matrix in node-index order (for small oracles)."""
        n = len(self.nodes)
        a = np.zeros((n, n))
        for i in range(n):
            for v, w in self._adj[i].items():
                a[i, self._index[v]] = w
            a[i, i] = self._loops[i]
        return a

    def connected_components(self, within: Iterable[Node] | None = None) -> list[list[Node]]:
        """Connected components of the subgraph induced by ``within``.

        Components are returned in order of their smallest node index, each
        listed in node-index order.
        """
        if within is None:
            pool = set(range(len(self.nodes)))
        else:
            pool = {self._index[u] for u in within}
        components: list[list[Node]] = []
        remaining = sorted(pool)
        seen: set[int] = set()
        for start in remaining:
            if start in seen:
                continue
            stack = [start]
            seen.add(start)
            comp = []
            while stack:
                i = stack.pop()
                comp.append(i)
                for v in self._adj[i]:
                    j = self._index[v]
                    if j in pool and j not in seen:
                        seen.add(j)
                        stack.append(j)
            components.append([self.nodes[i] for i in sorted(comp)])
        return components
