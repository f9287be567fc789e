# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython Louvain local-move kernel.

Compiled twin of ``_kernel_py``: identical sweep order (splitmix64-driven
Fisher-Yates shuffle), move score, and tie-breaking, so partitions are
bit-identical across kernels.
"""

import numpy as np

from libc.stdint cimport int64_t, uint64_t


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


def local_move_phase(indptr, indices, weights, degrees, double total_weight,
                     double gamma, seed, int max_sweeps, init=None):
    """Greedy modularity local moves until a full sweep makes no move."""
    cdef int64_t[:] indptr_v = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef int64_t[:] indices_v = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double[:] weights_v = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[:] deg_v = np.ascontiguousarray(degrees, dtype=np.float64)
    cdef Py_ssize_t n = deg_v.shape[0]

    if init is None:
        comm_arr = np.arange(n, dtype=np.int64)
        tot_arr = np.asarray(degrees, dtype=np.float64).copy()
    else:
        comm_arr = np.ascontiguousarray(init, dtype=np.int64).copy()
        tot_arr = np.zeros(n, dtype=np.float64)
        np.add.at(tot_arr, comm_arr, np.asarray(degrees, dtype=np.float64))
    neigh_arr = np.zeros(n, dtype=np.float64)
    touched_arr = np.empty(n, dtype=np.int64)
    order_arr = np.arange(n, dtype=np.int64)

    cdef int64_t[:] comm = comm_arr
    cdef double[:] tot = tot_arr
    cdef double[:] neigh_w = neigh_arr
    cdef int64_t[:] touched = touched_arr
    cdef int64_t[:] order = order_arr

    cdef uint64_t state = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t r
    cdef Py_ssize_t sweep, i, j, p, t, n_touched
    cdef int64_t node, a, best, c, tmp
    cdef double ki, scale, best_score, score
    cdef int moves

    for sweep in range(max_sweeps):
        for i in range(n - 1, 0, -1):
            state = state + <uint64_t>0x9E3779B97F4A7C15
            r = _mix(state)
            j = <Py_ssize_t>(r % <uint64_t>(i + 1))
            tmp = order[i]
            order[i] = order[j]
            order[j] = tmp
        moves = 0
        for t in range(n):
            node = order[t]
            a = comm[node]
            n_touched = 0
            for p in range(indptr_v[node], indptr_v[node + 1]):
                c = comm[indices_v[p]]
                if neigh_w[c] == 0.0:
                    touched[n_touched] = c
                    n_touched += 1
                neigh_w[c] += weights_v[p]
            ki = deg_v[node]
            tot[a] -= ki
            scale = gamma * ki / total_weight
            best = a
            best_score = neigh_w[a] - scale * tot[a]
            for p in range(n_touched):
                c = touched[p]
                if c == a:
                    continue
                score = neigh_w[c] - scale * tot[c]
                if score > best_score or (score == best_score and c < best):
                    best = c
                    best_score = score
            tot[best] += ki
            if best != a:
                comm[node] = best
                moves += 1
            for p in range(n_touched):
                neigh_w[touched[p]] = 0.0
        if moves == 0:
            break
    return comm_arr
