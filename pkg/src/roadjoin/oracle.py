"""Brute-force reference answers, used to verify the partitioned engine.

One exact bounded search per R-member over the full graph; no hierarchy, no
shared threshold, no pruning beyond the query radius itself.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .graph import QuerySets, RoadNetwork
from .query import MatchPair
from .search import RegionGraph


def oracle_closest_pairs(net: RoadNetwork, q: QuerySets, k=None,
                         theta=math.inf) -> list[MatchPair]:
    """The k closest (r, s) pairs within theta by exhaustive search.

    ``k=None`` returns every pair within theta (the distance-join answer).
    Output is sorted by (dist, r, s); unreachable pairs never match.
    """
    if k is not None and k < 0:
        raise DomainError("k must be >= 0")
    if not theta > 0:
        raise DomainError("theta must be > 0")
    if k == 0:
        return []
    full = RegionGraph(net)
    found = []
    s_ids = q.s
    for r in q.r:
        dist, _ = full.dijkstra(int(r), radius=theta)
        ds = dist[s_ids]
        hit = np.flatnonzero(np.isfinite(ds))
        found.extend((float(ds[i]), int(r), int(s_ids[i])) for i in hit)
    found.sort()
    if k is not None:
        found = found[:k]
    return [MatchPair(r, s, d) for d, r, s in found]
