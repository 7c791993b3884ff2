"""Recursive bisection of a road network into well-separated regions.

Each split grows two clusters outward from a pair of seed vertices in
best-first order, always expanding the cluster whose cheapest frontier edge
is smallest after population smoothing.  Edges left running between the two
finished clusters become the split's boundary; their minimum weight is the
children's separation degree.  Repeating the split top-down yields a binary
hierarchy whose leaves hold at most ``leaf_size_limit`` vertices.
"""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FormatError
from .graph import RoadNetwork
from .search import RegionGraph

HIERARCHY_FORMAT_VERSION = 1


@dataclass(frozen=True)
class SmoothingConfig:
    """Population-smoothing strength for bisection, in [0, 1].

    0 compares raw frontier edge weights; 1 fully normalizes them by the
    growing clusters' relative populations.
    """

    alpha: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must be within [0, 1], got {self.alpha}")


def smoothed_weights(w1, w2, pop1, pop2, alpha):
    """Normalize two frontier edge weights by current cluster populations.

    Returns (pop1 / (pop1 + alpha*pop2) * w1, pop2 / (alpha*pop1 + pop2) * w2).
    With alpha = 0 this is the identity on (w1, w2).
    """
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must be within [0, 1], got {alpha}")
    if pop1 < 1 or pop2 < 1:
        raise DomainError("populations must be >= 1")
    if w1 < 0 or w2 < 0:
        raise DomainError("weights must be >= 0")
    return (pop1 / (pop1 + alpha * pop2) * w1,
            pop2 / (alpha * pop1 + pop2) * w2)


@dataclass(frozen=True)
class CrossEdge:
    """An edge leaving a partition: ``back`` is the endpoint inside it."""

    eid: int
    back: int
    front: int
    weight: float


@dataclass(eq=False)
class PartitionNode:
    """One region of the hierarchy.

    ``cross_edges`` are exactly the network edges with one endpoint inside
    ``vertices`` (kept sorted by (weight, eid)); their inside endpoints are
    the border nodes.  ``separation_degree`` is the minimum weight on the
    boundary created when this node was split off its sibling (inf for the
    root).
    """

    id: int
    vertices: np.ndarray
    cross_edges: list
    separation_degree: float
    parent: int | None
    left: "PartitionNode | None" = None
    right: "PartitionNode | None" = None
    _border: np.ndarray | None = field(default=None, repr=False)

    @property
    def population(self) -> int:
        return len(self.vertices)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def border_nodes(self) -> np.ndarray:
        if self._border is None:
            self._border = np.unique(
                np.asarray([ce.back for ce in self.cross_edges], dtype=np.int64)
            )
        return self._border

    def contains(self, vertex_ids) -> np.ndarray:
        ids = np.asarray(vertex_ids, dtype=np.int64)
        if ids.size == 0:
            return np.zeros(0, dtype=bool)
        pos = np.minimum(np.searchsorted(self.vertices, ids), len(self.vertices) - 1)
        return self.vertices[pos] == ids


@dataclass(eq=False)
class PartitionHierarchy:
    """Binary tree of regions; ``nodes[i].id == i`` and node 0 is the root."""

    nodes: list
    leaf_size_limit: int
    alpha: float

    @property
    def root(self) -> PartitionNode:
        return self.nodes[0]

    def leaves(self):
        return [n for n in self.nodes if n.is_leaf]

    def structurally_equal(self, other) -> bool:
        if (self.leaf_size_limit != other.leaf_size_limit
                or self.alpha != other.alpha
                or len(self.nodes) != len(other.nodes)):
            return False
        for a, b in zip(self.nodes, other.nodes):
            link = lambda n: None if n is None else n.id
            if (a.id != b.id or a.parent != b.parent
                    or link(a.left) != link(b.left) or link(a.right) != link(b.right)
                    or a.separation_degree != b.separation_degree
                    or len(a.vertices) != len(b.vertices)
                    or not np.array_equal(a.vertices, b.vertices)
                    or a.cross_edges != b.cross_edges):
                return False
        return True


def select_seeds(net: RoadNetwork, region) -> tuple[int, int]:
    """Pick an approximate diameter pair of the induced subgraph.

    Double sweep: search from the lowest-id region vertex, take the farthest
    vertex ``a``, search again from ``a`` and take the farthest ``b``.
    Distance ties and unreachable regions fall back to the smallest id, so
    the result is deterministic.
    """
    region = np.asarray(region, dtype=np.int64)
    if len(region) < 2:
        raise DomainError("seed selection needs a region of >= 2 vertices")
    rg = RegionGraph(net, region)
    d0, _ = rg.dijkstra(0)
    a_local = int(np.argmax(np.where(np.isfinite(d0), d0, -1.0)))
    d1, _ = rg.dijkstra(a_local)
    ranked = np.where(np.isfinite(d1), d1, -1.0)
    ranked[a_local] = -2.0
    b_local = int(np.argmax(ranked))
    return int(region[a_local]), int(region[b_local])


_LEFT, _RIGHT = 1, 2


def bisect(net: RoadNetwork, parent: PartitionNode, left_seed: int,
           right_seed: int, cfg: SmoothingConfig):
    """Split ``parent`` into two child regions grown from the given seeds.

    Children are returned as (left, right) with placeholder ids -1; the
    caller wires them into a hierarchy.  If both frontiers exhaust while
    region vertices remain (disconnected region), each leftover component
    goes whole to the currently smaller cluster.
    """
    region = parent.vertices
    if left_seed == right_seed:
        raise DomainError("seeds must be distinct")
    if not parent.contains([left_seed, right_seed]).all():
        raise DomainError("seeds must belong to the parent region")

    # Grow over the induced subgraph in local ids; plain lists keep the
    # frontier loop cheap.  Edges leaving the region (the parent's own
    # cross-edges) are dropped by the extraction and never traversed.
    rg = RegionGraph(net, region)
    indptr = rg.indptr.tolist()
    nbrs = rg.nbrs.tolist()
    eids = rg.eids.tolist()
    wts = rg.wts.tolist()
    n_local = rg.n
    seed_l, seed_r = (int(v) for v in rg.to_local([left_seed, right_seed]))

    side = [0] * n_local
    side[seed_l] = _LEFT
    side[seed_r] = _RIGHT
    pop_l = pop_r = 1
    heap_l: list = []
    heap_r: list = []
    boundary_eids = set()
    heappush, heappop = heapq.heappush, heapq.heappop

    def scan(v, own_heap, other_mark):
        for j in range(indptr[v], indptr[v + 1]):
            mark = side[nbrs[j]]
            if mark == 0:
                heappush(own_heap, (wts[j], eids[j], nbrs[j]))
            elif mark == other_mark:
                boundary_eids.add(eids[j])

    scan(seed_l, heap_l, _RIGHT)
    scan(seed_r, heap_r, _LEFT)

    # The left/right choice compares the population-smoothed frontier tops,
    # evaluated with the same operation shape as smoothed_weights (inlined;
    # this loop runs once per popped edge).  alpha = 0 reduces to the raw
    # weights exactly.
    alpha = cfg.alpha
    while heap_l or heap_r:
        if not heap_r:
            take_left = True
        elif not heap_l:
            take_left = False
        elif alpha == 0.0:
            take_left = heap_l[0][0] <= heap_r[0][0]
        else:
            take_left = (pop_l / (pop_l + alpha * pop_r) * heap_l[0][0]
                         <= pop_r / (alpha * pop_l + pop_r) * heap_r[0][0])
        if take_left:
            _, eid, front = heappop(heap_l)
            mark = side[front]
            if mark == 0:
                side[front] = _LEFT
                pop_l += 1
                scan(front, heap_l, _RIGHT)
            elif mark == _RIGHT:
                boundary_eids.add(eid)
        else:
            _, eid, front = heappop(heap_r)
            mark = side[front]
            if mark == 0:
                side[front] = _RIGHT
                pop_r += 1
                scan(front, heap_r, _LEFT)
            elif mark == _LEFT:
                boundary_eids.add(eid)

    if pop_l + pop_r < n_local:
        pops = {_LEFT: pop_l, _RIGHT: pop_r}
        _assign_leftover_components(indptr, nbrs, side, n_local, pops)

    side_arr = np.asarray(side, dtype=np.int8)
    left_vertices = region[side_arr == _LEFT]
    right_vertices = region[side_arr == _RIGHT]
    boundary = sorted((float(net.edge_weight[e]), int(e)) for e in boundary_eids)
    separation = boundary[0][0] if boundary else math.inf

    in_left = np.zeros(net.num_vertices, dtype=bool)
    in_left[left_vertices] = True
    children = []
    for vertices, is_left in ((left_vertices, True), (right_vertices, False)):
        edges = []
        for w, e in boundary:
            a, b = int(net.edge_a[e]), int(net.edge_b[e])
            back, front = (a, b) if in_left[a] == is_left else (b, a)
            edges.append(CrossEdge(e, back, front, w))
        for ce in parent.cross_edges:
            if in_left[ce.back] == is_left:
                edges.append(ce)
        edges.sort(key=lambda ce: (ce.weight, ce.eid))
        children.append(PartitionNode(-1, vertices, edges, separation, parent.id))
    return children[0], children[1]


def _assign_leftover_components(indptr, nbrs, side, n_local, pops):
    # Flood each unassigned component and hand it whole to the smaller cluster.
    for start in range(n_local):
        if side[start] != 0:
            continue
        side_val = _LEFT if pops[_LEFT] <= pops[_RIGHT] else _RIGHT
        side[start] = side_val
        count = 1
        stack = [start]
        while stack:
            u = stack.pop()
            for j in range(indptr[u], indptr[u + 1]):
                x = nbrs[j]
                if side[x] == 0:
                    side[x] = side_val
                    count += 1
                    stack.append(x)
        pops[side_val] += count


def build_hierarchy(net: RoadNetwork, leaf_size_limit: int,
                    cfg: SmoothingConfig | None = None) -> PartitionHierarchy:
    """Recursively bisect the whole network until leaves fit the size limit."""
    if leaf_size_limit < 1:
        raise DomainError("leaf_size_limit must be >= 1")
    cfg = cfg or SmoothingConfig()
    all_vertices = np.arange(net.num_vertices, dtype=np.int64)
    root = PartitionNode(0, all_vertices, [], math.inf, None)
    nodes = [root]
    stack = [root]
    while stack:
        node = stack.pop()
        if node.population <= leaf_size_limit or node.population < 2:
            continue
        seed_a, seed_b = select_seeds(net, node.vertices)
        left, right = bisect(net, node, seed_a, seed_b, cfg)
        left.id = len(nodes)
        right.id = len(nodes) + 1
        nodes.extend((left, right))
        node.left, node.right = left, right
        stack.append(right)
        stack.append(left)
    return PartitionHierarchy(nodes, leaf_size_limit, cfg.alpha)


def save_hierarchy(hierarchy: PartitionHierarchy, path) -> None:
    """Write the hierarchy as a JSON document; inf separation becomes null."""
    nodes_out = []
    for node in hierarchy.nodes:
        entry = {
            "id": node.id,
            "parent": node.parent,
            "left": None if node.left is None else node.left.id,
            "right": None if node.right is None else node.right.id,
            "separationDegree": (None if math.isinf(node.separation_degree)
                                 else node.separation_degree),
            "crossEdges": [
                {"eid": ce.eid, "back": ce.back, "front": ce.front, "weight": ce.weight}
                for ce in node.cross_edges
            ],
        }
        if node.is_leaf:
            entry["vertices"] = [int(v) for v in node.vertices]
        nodes_out.append(entry)
    doc = {
        "version": HIERARCHY_FORMAT_VERSION,
        "leafSizeLimit": hierarchy.leaf_size_limit,
        "alpha": hierarchy.alpha,
        "nodes": nodes_out,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_hierarchy(path) -> PartitionHierarchy:
    """Load a hierarchy file; raises FormatError on corruption or bad version."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: not a hierarchy file ({exc})") from None
    try:
        if doc["version"] != HIERARCHY_FORMAT_VERSION:
            raise FormatError(
                f"{path}: unsupported hierarchy version {doc['version']!r}"
            )
        raw_nodes = doc["nodes"]
        nodes = []
        for i, raw in enumerate(raw_nodes):
            if raw["id"] != i:
                raise FormatError(f"{path}: node ids must be dense and ordered")
            sep = raw["separationDegree"]
            edges = [CrossEdge(int(e["eid"]), int(e["back"]), int(e["front"]),
                               float(e["weight"]))
                     for e in raw["crossEdges"]]
            nodes.append(PartitionNode(
                i, None, edges,
                math.inf if sep is None else float(sep),
                raw["parent"],
            ))
        # Wire children and rebuild internal vertex sets bottom-up (children
        # always have larger ids than their parent).
        for i, raw in enumerate(raw_nodes):
            left, right = raw["left"], raw["right"]
            if (left is None) != (right is None):
                raise FormatError(f"{path}: node {i} has exactly one child")
            if left is not None:
                nodes[i].left = nodes[left]
                nodes[i].right = nodes[right]
        for i in range(len(nodes) - 1, -1, -1):
            node = nodes[i]
            if node.is_leaf:
                node.vertices = np.asarray(sorted(raw_nodes[i]["vertices"]),
                                           dtype=np.int64)
            else:
                node.vertices = np.sort(np.concatenate(
                    [node.left.vertices, node.right.vertices]
                ))
        return PartitionHierarchy(nodes, int(doc["leafSizeLimit"]),
                                  float(doc["alpha"]))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed hierarchy file ({exc})") from None
