"""Pure-Python Louvain local-move kernel.

This is the fallback twin of ``_kernel_cy``; both must implement exactly the
same sweep order (splitmix64-driven Fisher-Yates shuffle), the same move
score and the same tie-breaking so that partitions are bit-identical
regardless of which kernel is active.
"""

from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, (z ^ (z >> 31)) & _MASK


def local_move_phase(
    indptr: np.ndarray,
    indices: np.ndarray,
    weights: np.ndarray,
    degrees: np.ndarray,
    total_weight: float,
    gamma: float,
    seed: int,
    max_sweeps: int,
    init: np.ndarray | None = None,
) -> np.ndarray:
    """Greedy modularity local moves until a full sweep makes no move.

    Starts from the singleton partition (or ``init`` labels in [0, n) when
    given) and returns the (non-compressed) community label per node.  Ties
    in the move score break toward the lowest community label.
    """
    n = len(degrees)
    if init is None:
        comm = list(range(n))
        tot = [float(d) for d in degrees]
    else:
        comm = [int(c) for c in init]
        tot = [0.0] * n
        for i in range(n):
            tot[comm[i]] += float(degrees[i])
    neigh_w = [0.0] * n
    order = list(range(n))
    state = seed & _MASK

    for _ in range(max_sweeps):
        # Fisher-Yates with splitmix64, one fresh shuffle per sweep.
        for i in range(n - 1, 0, -1):
            state, r = _splitmix64(state)
            j = r % (i + 1)
            order[i], order[j] = order[j], order[i]
        moves = 0
        for i in order:
            a = comm[i]
            touched = []
            for p in range(indptr[i], indptr[i + 1]):
                c = comm[indices[p]]
                if neigh_w[c] == 0.0:
                    touched.append(c)
                neigh_w[c] += weights[p]
            ki = degrees[i]
            tot[a] -= ki
            scale = gamma * ki / total_weight
            best = a
            best_score = neigh_w[a] - scale * tot[a]
            for c in touched:
                if c == a:
                    continue
                score = neigh_w[c] - scale * tot[c]
                if score > best_score or (score == best_score and c < best):
                    best = c
                    best_score = score
            tot[best] += ki
            if best != a:
                comm[i] = best
                moves += 1
            for c in touched:
                neigh_w[c] = 0.0
        if moves == 0:
            break
    return np.array(comm, dtype=np.int64)
