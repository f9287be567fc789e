"""Independent brute-force oracles the optimized code is checked against.

Everything here is deliberately naive (double loops, exhaustive enumeration)
and shares no code with the package internals.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def naive_modularity(adj: np.ndarray, labels, gamma: float = 1.0) -> float:
    """Direct O(n^2) evaluation of Q = (1/S) sum_ij [A_ij - g k_i k_j / S] d_ij."""
    n = adj.shape[0]
    k = adj.sum(axis=1)
    s = adj.sum()
    q = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                q += adj[i, j] - gamma * k[i] * k[j] / s
    return q / s


def set_partitions(n: int):
    """All set partitions of range(n) as label arrays (restricted growth strings)."""
    labels = [0] * n

    def rec(i: int, max_label: int):
        if i == n:
            yield list(labels)
            return
        for c in range(max_label + 2):
            labels[i] = c
            yield from rec(i + 1, max(max_label, c))

    yield from rec(1, 0) if n > 1 else iter([[0] * n])


def brute_force_best_partition(adj: np.ndarray, gamma: float = 1.0):
    """Exhaustive search over all partitions; returns (best_q, best_labels)."""
    n = adj.shape[0]
    k = adj.sum(axis=1)
    s = adj.sum()
    b = adj - gamma * np.outer(k, k) / s
    best_q = -math.inf
    best_labels = None
    for labels in set_partitions(n):
        lab = np.array(labels)
        mask = lab[:, None] == lab[None, :]
        q = float((b * mask).sum()) / s
        if q > best_q:
            best_q = q
            best_labels = labels
    return best_q, best_labels


def naive_window_sum(edges, a: int, b: int):
    """Filter-and-sum aggregation oracle over (t, origin, dest, w) tuples."""
    out = {}
    for t, o, d, w in edges:
        if a <= t <= b:
            out[(o, d)] = out.get((o, d), 0.0) + w
    return out


def naive_conductance(weighted_edges, s: set) -> float:
    """Edge-scan conductance over undirected (u, v, w) edges (u==v allowed)."""
    cut = 0.0
    vol = 0.0
    for u, v, w in weighted_edges:
        if u == v:
            if u in s:
                vol += w
            continue
        inside = (u in s) + (v in s)
        if inside == 1:
            cut += w
        vol += w * inside
    return cut / vol


def naive_activity_density(unit_values) -> float:
    """Loop evaluation of the root-mean-square density."""
    vals = list(unit_values)
    total = 0.0
    for v in vals:
        total += v * v
    return math.sqrt(total / len(vals))


def naive_sci_fraction(members: set, pair_weights: dict) -> float:
    """Double loop over unordered (a, b) -> w pairs; self-pairs excluded."""
    num = 0.0
    den = 0.0
    for (a, b), w in pair_weights.items():
        if a == b:
            continue
        if a in members and b in members:
            num += w
            den += w
        elif a in members or b in members:
            den += w
    return num / den


def naive_hml_fraction(members: set, directed_weights: dict, hm: set, low: set):
    """Double loop over directed (o, d) -> w entries; both directions count."""
    num = 0.0
    den = 0.0
    for i, k in itertools.product(sorted(hm & members), sorted(low)):
        v = directed_weights.get((i, k), 0.0) + directed_weights.get((k, i), 0.0)
        den += v
        if k in members:
            num += v
    if not (hm & members) or den == 0.0:
        return None
    return num / den


def spearman(x, y) -> float:
    """Spearman rank correlation (average ranks for ties)."""
    def ranks(vals):
        order = sorted(range(len(vals)), key=lambda i: vals[i])
        r = [0.0] * len(vals)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and vals[order[j + 1]] == vals[order[i]]:
                j += 1
            avg = (i + j) / 2.0 + 1.0
            for t in range(i, j + 1):
                r[order[t]] = avg
            i = j + 1
        return r

    rx, ry = np.array(ranks(list(x))), np.array(ranks(list(y)))
    rx -= rx.mean()
    ry -= ry.mean()
    denom = math.sqrt(float((rx**2).sum() * (ry**2).sum()))
    return float((rx * ry).sum()) / denom
