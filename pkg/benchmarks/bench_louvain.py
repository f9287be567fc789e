"""Benchmark the compiled Louvain local-move kernel against the pure-Python twin.

Builds event-window snapshots from a synthetic planted-partition scenario,
times ``local_move_phase`` from both kernels on the same CSR inputs, and
verifies the partitions are bit-identical.

Usage: python3 benchmarks/bench_louvain.py [--tracts N] [--repeats R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from stablecomm import _kernel_py
from stablecomm.stream import aggregate_window, symmetrize
from stablecomm.synth import gen_mobility, ground_truth, harris_like_spec

try:
    from stablecomm import _kernel_cy
except ImportError:
    _kernel_cy = None


def build_snapshots():
    spec = harris_like_spec(21)
    truth = ground_truth(spec)
    stream = gen_mobility(spec, truth)
    graphs = []
    for scale in (16, 8, 4):
        for a in range(0, spec.n_days - scale + 1, scale):
            graphs.append(symmetrize(aggregate_window(stream, a, a + scale - 1)))
    return graphs


def time_kernel(kernel, csr_inputs, repeats: int):
    best = np.inf
    outputs = None
    for _ in range(repeats):
        start = time.perf_counter()
        outputs = [
            kernel.local_move_phase(indptr, indices, weights, degrees, s, 1.0, 42, 100)
            for indptr, indices, weights, degrees, s in csr_inputs
        ]
        best = min(best, time.perf_counter() - start)
    return best, outputs


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    graphs = build_snapshots()
    csr_inputs = []
    for g in graphs:
        indptr, indices, weights, _ = g.csr()
        csr_inputs.append((indptr, indices, weights, g.degrees.copy(), g.total_weight))
    n_edges = sum(len(ci[1]) for ci in csr_inputs) // 2
    print(f"{len(graphs)} snapshots, {len(graphs[0].nodes)} nodes, "
          f"{n_edges} undirected edges total")

    py_time, py_out = time_kernel(_kernel_py, csr_inputs, args.repeats)
    print(f"pure python : {py_time * 1000:9.1f} ms")
    if _kernel_cy is None:
        print("cython kernel not built; install with the extension enabled to compare")
        return
    cy_time, cy_out = time_kernel(_kernel_cy, csr_inputs, args.repeats)
    print(f"cython      : {cy_time * 1000:9.1f} ms")
    identical = all(np.array_equal(a, b) for a, b in zip(py_out, cy_out))
    print(f"speedup     : {py_time / cy_time:9.1f}x   partitions identical: {identical}")
    if not identical:
        raise SystemExit("kernel outputs diverged")


if __name__ == "__main__":
    main()
