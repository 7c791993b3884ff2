"""Bounded shortest-path searches, optionally confined to a vertex region.

``RegionGraph`` extracts the subgraph induced by a region once and then runs
any number of cheap searches over it; this is the workhorse behind local
partition processing, cross-edge expansion, and the verification oracle.
"""
from __future__ import annotations

import math

import numpy as np

from . import backend
from .errors import DomainError, IntegrityError
from .graph import RoadNetwork


class RegionGraph:
    """CSR view of the subgraph induced by a vertex subset.

    Vertices are renumbered 0..len(region)-1 in ascending global id; edges
    with a far end outside the region, and any explicitly forbidden edge
    ids, are dropped.  Searches reuse internal heap scratch, so a single
    instance must not run concurrent searches; workers build their own.
    """

    def __init__(self, net: RoadNetwork, region=None, forbidden_edges=None):
        self._net = net
        forbidden = None
        if forbidden_edges is not None:
            forbidden = np.unique(np.asarray(list(forbidden_edges), dtype=np.int64))
            if forbidden.size == 0:
                forbidden = None
        if region is None and forbidden is None:
            self.vertices = None
            self.n = net.num_vertices
            self.indptr = net.indptr
            self.nbrs = net.nbr_vertex
            self.eids = net.nbr_edge
            self.wts = net.nbr_weight
        else:
            if region is None:
                region = np.arange(net.num_vertices, dtype=np.int64)
            else:
                region = np.asarray(region, dtype=np.int64)
            self.vertices = region
            self.n = len(region)
            self.indptr, self.nbrs, self.eids, self.wts = _extract_csr(
                net, region, forbidden
            )
        self._heap_keys = None
        self._heap_vals = None

    def to_local(self, global_ids) -> np.ndarray:
        ids = np.asarray(global_ids, dtype=np.int64)
        if self.vertices is None:
            return ids
        pos = np.searchsorted(self.vertices, ids)
        if ids.size:
            pos_c = np.minimum(pos, self.n - 1)
            if self.n == 0 or (self.vertices[pos_c] != ids).any():
                raise IntegrityError("vertex not contained in region")
        return pos.astype(np.int64)

    def to_global(self, local_ids) -> np.ndarray:
        ids = np.asarray(local_ids, dtype=np.int64)
        if self.vertices is None:
            return ids
        return self.vertices[ids]

    def dijkstra(self, source_local: int, radius=math.inf, init_cost=0.0):
        """Distances from a local source; entries beyond ``radius`` stay inf.

        Returns (dist array over local ids, number of settled vertices).
        """
        if self._heap_keys is None:
            cap = len(self.nbrs) + 2
            self._heap_keys = np.empty(cap, dtype=np.float64)
            self._heap_vals = np.empty(cap, dtype=np.int64)
        return backend.dijkstra_csr(
            self.indptr, self.nbrs, self.wts,
            int(source_local), float(radius), float(init_cost),
            self._heap_keys, self._heap_vals,
        )


def _extract_csr(net, region, forbidden):
    deg = net.indptr[region + 1] - net.indptr[region]
    total = int(deg.sum())
    row_of = np.repeat(np.arange(len(region), dtype=np.int64), deg)
    if total:
        offsets = np.concatenate([[0], np.cumsum(deg)[:-1]])
        idx = np.arange(total, dtype=np.int64) - np.repeat(offsets, deg) \
            + np.repeat(net.indptr[region], deg)
    else:
        idx = np.empty(0, dtype=np.int64)
    cand_v = net.nbr_vertex[idx]
    cand_e = net.nbr_edge[idx]
    cand_w = net.nbr_weight[idx]
    if len(region):
        pos = np.searchsorted(region, cand_v)
        pos_c = np.minimum(pos, len(region) - 1)
        keep = region[pos_c] == cand_v
    else:
        pos = np.empty(0, dtype=np.int64)
        keep = np.zeros(0, dtype=bool)
    if forbidden is not None and keep.any():
        keep &= ~np.isin(cand_e, forbidden)
    indptr = np.zeros(len(region) + 1, dtype=np.int64)
    np.cumsum(np.bincount(row_of[keep], minlength=len(region)), out=indptr[1:])
    return indptr, pos[keep].astype(np.int64), cand_e[keep], cand_w[keep]


def bounded_dijkstra(net: RoadNetwork, source: int, radius=math.inf,
                     forbidden=None, region=None) -> dict:
    """Exact distances d(source, v) <= radius as a {vertex: distance} map.

    ``forbidden`` edges are never traversed and the search never leaves
    ``region`` when one is given.
    """
    if not 0 <= source < net.num_vertices:
        raise DomainError(f"source vertex {source} not in network")
    if radius < 0:
        raise DomainError("radius must be >= 0")
    region_arr = None
    if region is not None:
        region_arr = np.unique(np.asarray(list(region), dtype=np.int64))
        if source not in region_arr:
            raise DomainError("source must belong to the search region")
    rg = RegionGraph(net, region_arr, forbidden)
    dist, _ = rg.dijkstra(int(rg.to_local(np.asarray([source]))[0]), radius)
    reached = np.flatnonzero(np.isfinite(dist))
    out_ids = rg.to_global(reached)
    return {int(v): float(dist[i]) for v, i in zip(out_ids, reached)}
