"""Numba-compiled bounded Dijkstra kernel over CSR adjacency arrays.

The binary heap lives in caller-provided scratch arrays so repeated searches
over the same region reuse one allocation.  ``nogil=True`` lets the scheduler
run kernels from several worker threads truly in parallel.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def dijkstra_csr(indptr, nbrs, wts, source, radius, init_cost, heap_keys, heap_vals):
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf)
    dist[source] = init_cost
    heap_keys[0] = init_cost
    heap_vals[0] = source
    size = 1
    settled = 0
    while size > 0:
        d = heap_keys[0]
        u = heap_vals[0]
        size -= 1
        heap_keys[0] = heap_keys[size]
        heap_vals[0] = heap_vals[size]
        i = 0
        while True:
            left = 2 * i + 1
            if left >= size:
                break
            m = left
            right = left + 1
            if right < size and heap_keys[right] < heap_keys[left]:
                m = right
            if heap_keys[m] < heap_keys[i]:
                heap_keys[i], heap_keys[m] = heap_keys[m], heap_keys[i]
                heap_vals[i], heap_vals[m] = heap_vals[m], heap_vals[i]
                i = m
            else:
                break
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
                heap_keys[size] = nd
                heap_vals[size] = v
                i = size
                size += 1
                while i > 0:
                    p = (i - 1) >> 1
                    if heap_keys[i] < heap_keys[p]:
                        heap_keys[i], heap_keys[p] = heap_keys[p], heap_keys[i]
                        heap_vals[i], heap_vals[p] = heap_vals[p], heap_vals[i]
                        i = p
                    else:
                        break
    return dist, settled
