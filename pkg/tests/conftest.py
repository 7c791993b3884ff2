"""Shared graph builders and an independent quadratic reference oracle."""
from __future__ import annotations

import math

import numpy as np
import pytest

from roadjoin import RoadNetwork


def dyadic_weight(rng, max_units=10 * 2**20):
    """Uniform weight in (0, 10] on a 2^-20 grid: sums stay exact in doubles."""
    return float(rng.integers(1, max_units + 1)) / 2**20


def path_network(weights):
    return RoadNetwork.from_edges(
        len(weights) + 1, [(i, i + 1, float(w)) for i, w in enumerate(weights)]
    )


def grid_network(rows, cols, weight=1.0, rng=None):
    """Grid graph; constant weights unless an rng is given (dyadic weights)."""
    edges = []
    vid = lambda r, c: r * cols + c
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                w = weight if rng is None else dyadic_weight(rng)
                edges.append((vid(r, c), vid(r, c + 1), w))
            if r + 1 < rows:
                w = weight if rng is None else dyadic_weight(rng)
                edges.append((vid(r, c), vid(r + 1, c), w))
    return RoadNetwork.from_edges(rows * cols, edges)


def random_connected_network(rng, n, extra_edge_factor=0.8):
    """Random connected graph: a random attachment tree plus extra edges."""
    edges = [(i, int(rng.integers(0, i)), dyadic_weight(rng)) for i in range(1, n)]
    for a, b in rng.integers(0, n, size=(int(extra_edge_factor * n), 2)):
        if a != b:
            edges.append((int(a), int(b), dyadic_weight(rng)))
    return RoadNetwork.from_edges(n, edges)


def edge_list(net):
    """(eid, a, b, w) tuples of a network, for reference computations."""
    return [
        (e, int(net.edge_a[e]), int(net.edge_b[e]), float(net.edge_weight[e]))
        for e in range(net.num_edges)
    ]


def reference_distances(n, edges, source, forbidden=(), region=None):
    """Quadratic relaxation (Bellman-Ford style) over an explicit edge list.

    Deliberately free of heaps, CSR arrays, and radius logic so it shares no
    code path with the package's searches.
    """
    allowed = set(range(n)) if region is None else set(region)
    banned = set(forbidden)
    dist = {v: math.inf for v in allowed}
    dist[source] = 0.0
    for _ in range(max(len(allowed), 1)):
        changed = False
        for eid, a, b, w in edges:
            if eid in banned or a not in allowed or b not in allowed:
                continue
            if dist[a] + w < dist[b]:
                dist[b] = dist[a] + w
                changed = True
            if dist[b] + w < dist[a]:
                dist[a] = dist[b] + w
                changed = True
        if not changed:
            break
    return {v: d for v, d in dist.items() if math.isfinite(d)}


def reference_pairs(net, r_ids, s_ids, theta=math.inf):
    """All (r, s, dist) within theta by quadratic reference search."""
    edges = edge_list(net)
    out = []
    for r in r_ids:
        dist = reference_distances(net.num_vertices, edges, int(r))
        for s in s_ids:
            d = dist.get(int(s), math.inf)
            if d <= theta:
                out.append((d, int(r), int(s)))
    out.sort()
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20160601)
