"""Pure-Python fallback for the bounded Dijkstra kernel.

Same contract as the numba version in ``_kernels_numba``: distances are
bit-identical between the two (both compute, for every vertex, the minimum
over all paths of the left-to-right floating-point sum of edge weights).
"""
from __future__ import annotations

import heapq

import numpy as np


def dijkstra_csr(indptr, nbrs, wts, source, radius, init_cost, heap_keys, heap_vals):
    """Bounded single-source shortest paths over CSR arrays.

    Settles every vertex whose distance from ``source`` (counting the seed
    cost ``init_cost``) is <= ``radius``; all other entries stay +inf.
    ``heap_keys``/``heap_vals`` are scratch buffers used only by the compiled
    twin; they are accepted here so both backends share one call signature.

    Returns (dist, settled_count).
    """
    n = len(indptr) - 1
    dist = np.full(n, np.inf)
    dist[source] = init_cost
    heap = [(init_cost, source)]
    settled = 0
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if d > radius:
            break
        settled += 1
        for j in range(indptr[u], indptr[u + 1]):
            v = nbrs[j]
            nd = d + wts[j]
            if nd < dist[v] and nd <= radius:
                dist[v] = nd
                heapq.heappush(heap, (nd, int(v)))
    return dist, settled
