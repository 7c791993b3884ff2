"""Per-partition closest-pair search and the two-child merge.

Local processing finds pairs whose shortest path stays inside one region and
records, for every R-member, its exact region-confined distance to each
border node (the "inside routes").  Merging two siblings then only has to
expand their boundary edges: a route to the boundary, plus the boundary edge,
plus a search on the far side reconstructs every pair whose path crosses.
Expansion is bounded by the query radius theta and by the current value of
the shared pruning threshold, and boundary edges are tried in ascending
weight so the merge can stop at the first edge that cannot improve the
result.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, RoadJoinError
from .graph import QuerySets, RoadNetwork
from .partition import CrossEdge, PartitionHierarchy, PartitionNode
from .search import RegionGraph


class MatchPair(NamedTuple):
    """A matched (r in R, s in S) pair with its network distance."""

    r: int
    s: int
    dist: float

    @property
    def sort_key(self):
        return (self.dist, self.r, self.s)


@dataclass(frozen=True)
class QueryParams:
    """What to retrieve: the k best pairs, or all pairs within theta.

    ``k=None`` selects distance-join mode and requires a finite theta.
    """

    k: int | None
    theta: float = math.inf

    def __post_init__(self):
        if self.k is None:
            if not (math.isfinite(self.theta) and self.theta > 0):
                raise DomainError("distance-join mode requires a finite theta > 0")
        else:
            if self.k < 1:
                raise DomainError("k must be >= 1")
            if self.theta <= 0:
                raise DomainError("theta must be > 0")

    @property
    def is_join(self) -> bool:
        return self.k is None

    @property
    def mode(self) -> str:
        return "distance-join" if self.is_join else "closest-pairs"


class ResultHeap:
    """Bounded worst-out collection of the best pairs seen so far.

    Keeps at most ``capacity`` pairs (unbounded when None), never keeps a
    pair beyond ``theta``, and deduplicates on (r, s) retaining the smaller
    distance.  "Worst" is by (dist, r, s) lexicographic order, which makes
    eviction, and therefore the retained set, deterministic under ties.
    """

    def __init__(self, capacity=None, theta=math.inf):
        if capacity is not None and capacity < 1:
            raise DomainError("capacity must be >= 1 or None")
        self.capacity = capacity
        self.theta = theta
        self._best = {}
        self._heap = []

    def __len__(self) -> int:
        return len(self._best)

    @property
    def full(self) -> bool:
        return self.capacity is not None and len(self._best) >= self.capacity

    def insert(self, r, s, dist) -> bool:
        """Offer a pair; returns True if it is retained."""
        if dist > self.theta:
            return False
        key = (r, s)
        current = self._best.get(key)
        if current is not None:
            if dist >= current:
                return False
            self._best[key] = dist
            heapq.heappush(self._heap, (-dist, -r, -s))
            return True
        if self.full and (dist, r, s) >= self.worst().sort_key:
            return False
        self._best[key] = dist
        heapq.heappush(self._heap, (-dist, -r, -s))
        if self.capacity is not None and len(self._best) > self.capacity:
            self._evict_worst()
        return True

    def insert_pair(self, pair: MatchPair) -> bool:
        return self.insert(pair.r, pair.s, pair.dist)

    def merge_from(self, other: "ResultHeap") -> None:
        for (r, s), dist in other._best.items():
            self.insert(r, s, dist)

    def _clean_top(self):
        heap = self._heap
        while heap:
            nd, nr, ns = heap[0]
            if self._best.get((-nr, -ns)) == -nd:
                return
            heapq.heappop(heap)

    def _evict_worst(self):
        self._clean_top()
        nd, nr, ns = heapq.heappop(self._heap)
        del self._best[(-nr, -ns)]

    def worst(self) -> MatchPair:
        if not self._best:
            raise RoadJoinError("empty result heap has no worst pair")
        self._clean_top()
        nd, nr, ns = self._heap[0]
        return MatchPair(-nr, -ns, -nd)

    def kth_distance(self) -> float:
        """Distance of the worst retained pair when full, else inf."""
        if not self.full:
            return math.inf
        return self.worst().dist

    def items(self) -> list[MatchPair]:
        """Pairs sorted by (dist, r, s)."""
        out = [MatchPair(r, s, d) for (r, s), d in self._best.items()]
        out.sort(key=lambda p: p.sort_key)
        return out


def format_pairs(pairs, id_map=None) -> str:
    """Render pairs as ``r s dist`` lines, sorted by (dist, r, s)."""
    lines = []
    for p in sorted(pairs, key=lambda m: m.sort_key):
        r, s = (p.r, p.s) if id_map is None else (id_map[p.r], id_map[p.s])
        lines.append(f"{r} {s} {p.dist:.9g}")
    return "\n".join(lines) + ("\n" if lines else "")


def local_pairs(net: RoadNetwork, leaf: PartitionNode, q: QuerySets,
                p: QueryParams, threshold, instr=None):
    """Process one region in isolation.

    Runs a bounded search from every R-member inside the region, confined to
    the region (its cross-edges are never traversed), with radius
    min(theta, current shared threshold).  Returns the best <= k pairs found
    and the inside routes: border vertex -> [(r, exact confined distance)].
    """
    heap = ResultHeap(p.k, p.theta)
    routes: dict[int, list[tuple[int, float]]] = {}
    r_members = np.intersect1d(q.r, leaf.vertices)
    if r_members.size == 0:
        return heap, routes
    rg = RegionGraph(net, leaf.vertices)
    s_members = np.intersect1d(q.s, leaf.vertices)
    s_local = rg.to_local(s_members)
    border = leaf.border_nodes()
    border_local = rg.to_local(border)
    for r in r_members:
        r = int(r)
        radius = min(p.theta, threshold.value)
        dist, settled = rg.dijkstra(int(rg.to_local([r])[0]), radius)
        if instr is not None:
            instr.add_settled(settled)
        if s_local.size:
            ds = dist[s_local]
            for i in np.flatnonzero(np.isfinite(ds)):
                heap.insert(r, int(s_members[i]), float(ds[i]))
        if border_local.size:
            db = dist[border_local]
            for i in np.flatnonzero(np.isfinite(db)):
                routes.setdefault(int(border[i]), []).append((r, float(db[i])))
        if heap.full:
            threshold.tighten(heap.kth_distance())
    return heap, routes


def expand_cross_edge(net: RoadNetwork, gp: PartitionNode, cross_edge: CrossEdge,
                      inside_routes, q: QuerySets, p: QueryParams,
                      local_theta: float, instr=None, _region=None,
                      _s_members=None, _s_local=None) -> list[MatchPair]:
    """Find pairs whose path crosses one boundary edge.

    Best-first expansion seeded at the edge's front end with the edge weight
    as initial cost, confined to ``gp``'s region (never traversing its
    cross-edges).  Every reached S-member at cost c combines with every
    inside route (r, d) at the back end into a candidate pair of distance
    d + c, kept when within ``local_theta``.  At most k pairs are returned.
    """
    if not inside_routes:
        return []
    rg = _region if _region is not None else RegionGraph(net, gp.vertices)
    if _s_local is None:
        _s_members = np.intersect1d(q.s, gp.vertices)
        _s_local = rg.to_local(_s_members)
    min_route = min(d for _, d in inside_routes)
    radius = local_theta - min_route
    if radius < cross_edge.weight or _s_local.size == 0:
        return []
    front_local = int(rg.to_local([cross_edge.front])[0])
    dist, settled = rg.dijkstra(front_local, radius, init_cost=cross_edge.weight)
    if instr is not None:
        instr.add_settled(settled)
        instr.count_expansion()
    out = ResultHeap(p.k, local_theta)
    ds = dist[_s_local]
    for i in np.flatnonzero(np.isfinite(ds)):
        s = int(_s_members[i])
        c = float(ds[i])
        for r, route_dist in inside_routes:
            total = route_dist + c
            if total <= local_theta:
                out.insert(r, s, total)
    return out.items()


def combine_pairs(net: RoadNetwork, parent: PartitionNode, left_res, right_res,
                  q: QuerySets, p: QueryParams, threshold, instr=None):
    """Merge the two children's results into the parent's.

    Merges the two pair heaps, then walks each child's boundary edges toward
    its sibling in ascending weight, stopping as soon as an edge alone
    outweighs the current k-th best (or theta in join mode), expanding the
    rest.  Finally recomputes the parent's inside routes by searching from
    each parent border node within the parent region.
    """
    if parent.left is None or parent.right is None:
        raise RoadJoinError("combine_pairs needs an internal node with two children")
    left_heap, left_routes = left_res
    right_heap, right_routes = right_res
    result = ResultHeap(p.k, p.theta)
    result.merge_from(left_heap)
    result.merge_from(right_heap)
    if result.full:
        threshold.tighten(result.kth_distance())

    rg = RegionGraph(net, parent.vertices)
    s_members = np.intersect1d(q.s, parent.vertices)
    s_local = rg.to_local(s_members)

    for child, sibling, routes in (
        (parent.left, parent.right, left_routes),
        (parent.right, parent.left, right_routes),
    ):
        side = "left" if child is parent.left else "right"
        # Boundary edges toward the sibling, already in ascending (weight, eid)
        # order; edges inherited from higher levels point outside the parent.
        if child.cross_edges:
            fronts = np.asarray([ce.front for ce in child.cross_edges], dtype=np.int64)
            toward = sibling.contains(fronts)
            boundary = [ce for ce, ok in zip(child.cross_edges, toward) if ok]
        else:
            boundary = []
        for ce in boundary:
            kth = result.kth_distance()
            if p.is_join:
                if ce.weight > p.theta:
                    if instr is not None:
                        instr.record_break(parent.id, side, ce, kth)
                    break
            elif result.full and ce.weight > kth:
                if instr is not None:
                    instr.record_break(parent.id, side, ce, kth)
                break
            entries = routes.get(ce.back, [])
            if instr is not None:
                instr.record_examined(parent.id, side, ce, kth, bool(entries))
            if not entries:
                continue
            local_theta = min(p.theta, threshold.value)
            matches = expand_cross_edge(
                net, parent, ce, entries, q, p, local_theta, instr,
                _region=rg, _s_members=s_members, _s_local=s_local,
            )
            for m in matches:
                result.insert_pair(m)
            if result.full:
                threshold.tighten(result.kth_distance())

    routes_out: dict[int, list[tuple[int, float]]] = {}
    if parent.cross_edges:
        r_members = np.intersect1d(q.r, parent.vertices)
        if r_members.size:
            r_local = rg.to_local(r_members)
            for b in parent.border_nodes():
                radius = min(p.theta, threshold.value)
                dist, settled = rg.dijkstra(int(rg.to_local([b])[0]), radius)
                if instr is not None:
                    instr.add_settled(settled)
                dr = dist[r_local]
                hit = np.flatnonzero(np.isfinite(dr))
                if hit.size:
                    routes_out[int(b)] = [
                        (int(r_members[i]), float(dr[i])) for i in hit
                    ]
    return result, routes_out


def distance_join(net: RoadNetwork, hierarchy: PartitionHierarchy, q: QuerySets,
                  theta: float, cfg=None, threshold_mode="global",
                  instr=None) -> list[MatchPair]:
    """All pairs (r, s) with network distance <= theta, sorted by (dist, r, s)."""
    if not theta > 0:
        raise DomainError("theta must be > 0")
    if not math.isfinite(theta):
        raise DomainError("distance join requires a finite theta")
    from .scheduler import closest_pairs_parallel

    p = QueryParams(k=None, theta=theta)
    heap = closest_pairs_parallel(net, hierarchy, q, p, cfg,
                                  threshold_mode=threshold_mode, instr=instr)
    return heap.items()
