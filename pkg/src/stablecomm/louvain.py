"""Weighted Louvain modularity maximization and partition quality measures.

The local-move inner loop is the hot kernel: a compiled Cython twin is used
when available and a pure-Python fallback otherwise (force the fallback with
``STABLECOMM_PURE=1``).  Both kernels produce bit-identical partitions.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ValidationError
from .graph import Node, UndirectedGraph

if os.environ.get("STABLECOMM_PURE") == "1":
    from . import _kernel_py as _kernel

    KERNEL = "python"
else:
    try:
        from . import _kernel_cy as _kernel  # type: ignore[no-redef]

        KERNEL = "cython"
    except ImportError:
        from . import _kernel_py as _kernel  # type: ignore[no-redef]

        KERNEL = "python"

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class QualityConfig:
    """Knobs for a Louvain run."""

    resolution: float = 1.0
    rng_seed: int = 0
    max_passes: int = 100
    restarts: int = 5

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValidationError(f"resolution must be > 0, got {self.resolution}")
        if self.max_passes < 1:
            raise ValidationError(f"max_passes must be >= 1, got {self.max_passes}")
        if self.restarts < 1:
            raise ValidationError(f"restarts must be >= 1, got {self.restarts}")


@dataclass(frozen=True)
class Partition:
    """Node-to-community assignment with dense labels 0..K-1."""

    assignment: dict[Node, int]
    n_communities: int = field(default=0)

    def __post_init__(self):
        labels = set(self.assignment.values())
        k = len(labels)
        if labels != set(range(k)):
            raise ValidationError("partition labels must be contiguous from 0")
        if self.n_communities == 0:
            object.__setattr__(self, "n_communities", k)
        elif self.n_communities != k:
            raise ValidationError("n_communities does not match the assignment")

    def communities(self) -> list[set[Node]]:
        out: list[set[Node]] = [set() for _ in range(self.n_communities)]
        for node, label in self.assignment.items():
            out[label].add(node)
        return out

    @classmethod
    def singletons(cls, nodes: Iterable[Node]) -> "Partition":
        return cls({u: i for i, u in enumerate(nodes)})


def _check_graph_partition(g: UndirectedGraph, p: Partition) -> None:
    if len(g) == 0:
        raise ValidationError("empty graph")
    if set(p.assignment) != set(g.nodes):
        raise ValidationError("partition nodes do not match graph nodes")


def modularity(g: UndirectedGraph, p: Partition, resolution: float = 1.0) -> float:
    """Newman modularity Q of a partition at the given resolution.

    Q = sum_c [ W_c / S - resolution * (tot_c / S)^2 ] with S the full
    adjacency-matrix sum, W_c the matrix sum restricted to community c, and
    tot_c the summed weighted degrees of c.
    """
    _check_graph_partition(g, p)
    s = g.total_weight
    if s <= 0:
        raise ValidationError("graph total weight must be positive")
    internal = np.zeros(p.n_communities)
    tot = np.zeros(p.n_communities)
    for u in g.nodes:
        c = p.assignment[u]
        tot[c] += g.degree(u)
        internal[c] += g.self_loop(u)
        for v, w in g.neighbors(u):
            if p.assignment[v] == c:
                internal[c] += w
    return float(np.sum(internal / s - resolution * (tot / s) ** 2))


def _compress_labels(comm: np.ndarray) -> tuple[np.ndarray, int]:
    """Relabel to dense 0..K-1 in order of first occurrence by node index."""
    mapping: dict[int, int] = {}
    out = np.empty_like(comm)
    for i, c in enumerate(comm):
        c = int(c)
        if c not in mapping:
            mapping[c] = len(mapping)
        out[i] = mapping[c]
    return out, len(mapping)


def _aggregate(
    indptr: np.ndarray,
    indices: np.ndarray,
    weights: np.ndarray,
    loops: np.ndarray,
    comm: np.ndarray,
    k: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Collapse communities into single nodes, summing edge weights."""
    adj: list[dict[int, float]] = [dict() for _ in range(k)]
    new_loops = np.zeros(k)
    n = len(loops)
    for i in range(n):
        ci = int(comm[i])
        new_loops[ci] += loops[i]
        for p in range(indptr[i], indptr[i + 1]):
            cj = int(comm[indices[p]])
            if cj == ci:
                new_loops[ci] += weights[p]
            else:
                adj[ci][cj] = adj[ci].get(cj, 0.0) + weights[p]
    new_indptr = np.zeros(k + 1, dtype=np.int64)
    idx: list[int] = []
    wts: list[float] = []
    for c in range(k):
        row = sorted(adj[c].items())
        new_indptr[c + 1] = new_indptr[c] + len(row)
        idx.extend(j for j, _ in row)
        wts.extend(w for _, w in row)
    new_indices = np.array(idx, dtype=np.int64)
    new_weights = np.array(wts, dtype=np.float64)
    new_deg = new_loops.copy()
    for c in range(k):
        for p in range(new_indptr[c], new_indptr[c + 1]):
            new_deg[c] += new_weights[p]
    return new_indptr, new_indices, new_weights, new_loops, new_deg


def louvain(g: UndirectedGraph, cfg: QualityConfig = QualityConfig()) -> Partition:
    """Two-phase Louvain on an undirected weighted graph.

    Deterministic for a fixed seed: node visitation order is a seeded shuffle
    per sweep and move ties break toward the lowest community label.  After
    each aggregation cascade the local phase is re-run on the original graph
    from the current assignment, so finest-level moves that only become
    profitable after merging are still taken; cycles repeat to a fixpoint.
    The whole procedure runs ``cfg.restarts`` times with derived seeds and
    the highest-modularity partition wins (earliest restart on ties), which
    guards against the greedy phase's local optima on small graphs.  A final
    pass splits each community into connected components.
    """
    best: Partition | None = None
    best_q = -np.inf
    for restart in range(cfg.restarts):
        run_seed = (cfg.rng_seed + restart * _GOLDEN) & _MASK
        part = _louvain_run(g, cfg, run_seed)
        q = modularity(g, part, cfg.resolution)
        if q > best_q:
            best = part
            best_q = q
    assert best is not None
    return best


def _louvain_run(g: UndirectedGraph, cfg: QualityConfig, run_seed: int) -> Partition:
    """One seeded restart of the refine/aggregate cycle."""
    if len(g) == 0:
        raise ValidationError("empty graph")
    s = g.total_weight
    if s <= 0:
        raise ValidationError("graph total weight must be positive")

    indptr0, indices0, weights0, loops0 = g.csr()
    degrees0 = g.degrees.copy()
    node_to_comm = np.arange(len(g), dtype=np.int64)
    level_index = 0

    def _run_kernel(indptr, indices, weights, degrees, init=None):
        nonlocal level_index
        level_index += 1
        level_seed = (run_seed ^ (level_index * _GOLDEN)) & _MASK
        return _kernel.local_move_phase(
            indptr, indices, weights, degrees, s, cfg.resolution, level_seed,
            cfg.max_passes, init,
        )

    for _cycle in range(cfg.max_passes):
        comm, k = _compress_labels(
            _run_kernel(indptr0, indices0, weights0, degrees0, node_to_comm)
        )
        if np.array_equal(comm, _compress_labels(node_to_comm)[0]) and _cycle > 0:
            break
        node_to_comm = comm
        n_current = k
        indptr, indices, weights, loops, degrees = _aggregate(
            indptr0, indices0, weights0, loops0, comm, k
        )
        while True:
            sub, k = _compress_labels(_run_kernel(indptr, indices, weights, degrees))
            node_to_comm = sub[node_to_comm]
            if k == n_current:
                break
            indptr, indices, weights, loops, degrees = _aggregate(
                indptr, indices, weights, loops, sub, k
            )
            n_current = k

    # Split any internally disconnected community into its components.
    groups: dict[int, list[Node]] = {}
    for i, u in enumerate(g.nodes):
        groups.setdefault(int(node_to_comm[i]), []).append(u)
    assignment: dict[Node, int] = {}
    next_label = 0
    for label in sorted(groups):
        for component in g.connected_components(groups[label]):
            for u in component:
                assignment[u] = next_label
            next_label += 1
    return Partition(assignment, next_label)


def conductance(g: UndirectedGraph, s: set[Node] | frozenset[Node]) -> float:
    """cut(S) / vol(S): boundary weight of S over its total weighted degree.

    Self-loops count once toward the volume and never toward the cut.
    """
    if not s:
        raise ValidationError("node set must be non-empty")
    missing = [u for u in s if u not in g]
    if missing:
        raise ValidationError(f"nodes not in graph: {sorted(map(str, missing))}")
    cut = 0.0
    vol = 0.0
    for u in sorted(s, key=str):  # canonical order keeps the sums reproducible
        vol += g.degree(u)
        for v, w in g.neighbors(u):
            if v not in s:
                cut += w
    if vol <= 0:
        raise ValidationError("node set has zero volume (isolated set)")
    return cut / vol


def inverse_conductance(g: UndirectedGraph, s: set[Node] | frozenset[Node]) -> float:
    """1 - conductance(g, s); higher means a larger in-community link share."""
    return 1.0 - conductance(g, s)
