"""Road-network representation, file ingestion, and query-set sampling.

The graph is undirected with non-negative edge weights.  Vertex coordinates
are carried through from the input for reporting, but all distances are
network (shortest-path) distances; coordinates never enter a computation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IntegrityError, ParseError


@dataclass(eq=False)
class RoadNetwork:
    """Undirected weighted graph in CSR form with dense vertex ids.

    Vertex ids are dense indices 0..n-1; ``original_ids[i]`` is the id the
    vertex carried in the input file.  Edges get dense ids 0..m-1 in file
    order (after self-loop removal); ``edge_file_ids`` keeps the input ids.
    The structure is immutable after construction and safe to share across
    threads.
    """

    xs: np.ndarray
    ys: np.ndarray
    original_ids: np.ndarray
    edge_a: np.ndarray
    edge_b: np.ndarray
    edge_weight: np.ndarray
    edge_file_ids: np.ndarray
    indptr: np.ndarray = field(repr=False)
    nbr_vertex: np.ndarray = field(repr=False)
    nbr_edge: np.ndarray = field(repr=False)
    nbr_weight: np.ndarray = field(repr=False)

    @property
    def num_vertices(self) -> int:
        return len(self.xs)

    @property
    def num_edges(self) -> int:
        return len(self.edge_a)

    def vertices(self):
        """Iterate (dense id, x, y) triples."""
        for i in range(self.num_vertices):
            yield i, float(self.xs[i]), float(self.ys[i])

    def dense_ids(self, original_ids) -> np.ndarray:
        """Map original vertex ids from the input file to dense ids."""
        ids = np.asarray(list(original_ids), dtype=np.int64)
        if ids.size == 0:
            return ids
        if self.num_vertices == 0:
            raise IntegrityError(f"unknown vertex id {int(ids[0])}")
        pos = np.searchsorted(self.original_ids, ids)
        pos_c = np.minimum(pos, len(self.original_ids) - 1)
        bad = self.original_ids[pos_c] != ids
        if bad.any():
            raise IntegrityError(f"unknown vertex id {int(ids[bad][0])}")
        return pos.astype(np.int64)

    @classmethod
    def from_edges(cls, num_vertices, edges, coords=None, original_ids=None,
                   edge_file_ids=None):
        """Build a network from (a, b, weight) triples with dense vertex ids.

        Self-loops are dropped; parallel edges are kept.  Mostly a test and
        benchmark convenience next to :func:`load_network`.
        """
        if num_vertices < 0:
            raise DomainError("num_vertices must be >= 0")
        a_list, b_list, w_list, fid_list = [], [], [], []
        for i, (a, b, w) in enumerate(edges):
            if w < 0:
                raise DomainError(f"negative edge weight {w} on edge {i}")
            if not (0 <= a < num_vertices and 0 <= b < num_vertices):
                raise IntegrityError(f"edge {i} references unknown vertex")
            if a == b:
                continue
            a_list.append(a)
            b_list.append(b)
            w_list.append(w)
            fid_list.append(i if edge_file_ids is None else edge_file_ids[i])
        a_arr = np.asarray(a_list, dtype=np.int64)
        b_arr = np.asarray(b_list, dtype=np.int64)
        w_arr = np.asarray(w_list, dtype=np.float64)
        f_arr = np.asarray(fid_list, dtype=np.int64)
        if coords is None:
            xs = np.zeros(num_vertices)
            ys = np.zeros(num_vertices)
        else:
            xs = np.asarray(coords[0], dtype=np.float64)
            ys = np.asarray(coords[1], dtype=np.float64)
        if original_ids is None:
            original_ids = np.arange(num_vertices, dtype=np.int64)
        indptr, nbr_v, nbr_e, nbr_w = _build_csr(num_vertices, a_arr, b_arr, w_arr)
        return cls(xs, ys, np.asarray(original_ids, dtype=np.int64),
                   a_arr, b_arr, w_arr, f_arr, indptr, nbr_v, nbr_e, nbr_w)


def _build_csr(n, edge_a, edge_b, edge_w):
    m = len(edge_a)
    src = np.concatenate([edge_a, edge_b])
    dst = np.concatenate([edge_b, edge_a])
    eid = np.concatenate([np.arange(m, dtype=np.int64)] * 2)
    wts = np.concatenate([edge_w, edge_w])
    order = np.argsort(src, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst[order], eid[order], wts[order]


def _data_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def load_network(node_file, edge_file) -> RoadNetwork:
    """Load a network from whitespace-separated node and edge files.

    Node lines are ``<id> <x> <y>``; edge lines are ``<eid> <a> <b> <weight>``.
    Blank lines and ``#`` comments are skipped.  Vertex ids are re-densified
    (the mapping is kept in ``original_ids``); self-loops are dropped.
    """
    ids, xs, ys = [], [], []
    for lineno, line in _data_lines(node_file):
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"{node_file}:{lineno}: expected '<id> <x> <y>', got {line!r}")
        try:
            ids.append(int(parts[0]))
            xs.append(float(parts[1]))
            ys.append(float(parts[2]))
        except ValueError as exc:
            raise ParseError(f"{node_file}:{lineno}: {exc}") from None
    original = np.asarray(ids, dtype=np.int64)
    sorted_ids = np.sort(original)
    if len(sorted_ids) > 1 and (sorted_ids[1:] == sorted_ids[:-1]).any():
        dup = int(sorted_ids[:-1][sorted_ids[1:] == sorted_ids[:-1]][0])
        raise IntegrityError(f"{node_file}: duplicate vertex id {dup}")
    order = np.argsort(original, kind="stable")
    xs = np.asarray(xs, dtype=np.float64)[order]
    ys = np.asarray(ys, dtype=np.float64)[order]
    n = len(sorted_ids)

    fids, raw_a, raw_b, wts = [], [], [], []
    for lineno, line in _data_lines(edge_file):
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(
                f"{edge_file}:{lineno}: expected '<eid> <a> <b> <weight>', got {line!r}"
            )
        try:
            fid, a, b = int(parts[0]), int(parts[1]), int(parts[2])
            w = float(parts[3])
        except ValueError as exc:
            raise ParseError(f"{edge_file}:{lineno}: {exc}") from None
        if w < 0:
            raise DomainError(f"{edge_file}:{lineno}: negative edge weight {w}")
        if a == b:
            continue
        fids.append(fid)
        raw_a.append(a)
        raw_b.append(b)
        wts.append(w)

    raw_ab = np.asarray(raw_a + raw_b, dtype=np.int64)
    pos = np.searchsorted(sorted_ids, raw_ab)
    pos_c = np.minimum(pos, max(n - 1, 0))
    if n == 0 and raw_ab.size:
        raise IntegrityError(f"{edge_file}: edge references vertex in an empty network")
    if raw_ab.size and (sorted_ids[pos_c] != raw_ab).any():
        bad = int(raw_ab[sorted_ids[pos_c] != raw_ab][0])
        raise IntegrityError(f"{edge_file}: edge references unknown vertex {bad}")
    m = len(fids)
    edge_a = pos[:m].astype(np.int64)
    edge_b = pos[m:].astype(np.int64)
    edge_w = np.asarray(wts, dtype=np.float64)
    indptr, nbr_v, nbr_e, nbr_w = _build_csr(n, edge_a, edge_b, edge_w)
    return RoadNetwork(xs, ys, sorted_ids, edge_a, edge_b, edge_w,
                       np.asarray(fids, dtype=np.int64), indptr, nbr_v, nbr_e, nbr_w)


@dataclass(frozen=True, eq=False)
class QuerySets:
    """Two disjoint vertex sets to be joined, kept as sorted dense-id arrays."""

    r: np.ndarray
    s: np.ndarray

    @classmethod
    def from_ids(cls, r_ids, s_ids, num_vertices=None):
        r = np.unique(np.asarray(list(r_ids), dtype=np.int64))
        s = np.unique(np.asarray(list(s_ids), dtype=np.int64))
        if (r.size and r[0] < 0) or (s.size and s[0] < 0):
            raise DomainError("vertex ids must be non-negative")
        if num_vertices is not None:
            if (r.size and r[-1] >= num_vertices) or (s.size and s[-1] >= num_vertices):
                raise DomainError("vertex id out of range")
        if np.intersect1d(r, s).size:
            raise DomainError("sets R and S must be disjoint")
        return cls(r, s)


def sample_sets(net: RoadNetwork, r_pct, s_pct, seed: int) -> QuerySets:
    """Sample disjoint R and S uniformly without replacement, R first.

    Set sizes are round(pct * |V| / 100); the same seed always yields the
    same sets.
    """
    for name, pct in (("r_pct", r_pct), ("s_pct", s_pct)):
        if not 0 <= pct <= 100:
            raise DomainError(f"{name} must be within [0, 100], got {pct}")
    if r_pct + s_pct > 100:
        raise DomainError("r_pct + s_pct must not exceed 100")
    n = net.num_vertices
    n_r = int(round(r_pct * n / 100.0))
    n_s = int(round(s_pct * n / 100.0))
    if n_r + n_s > n:
        raise DomainError("requested set sizes exceed the vertex count")
    rng = np.random.default_rng(seed)
    r = rng.choice(n, size=n_r, replace=False)
    remainder = np.setdiff1d(np.arange(n, dtype=np.int64), r, assume_unique=False)
    s = rng.choice(remainder, size=n_s, replace=False)
    return QuerySets(np.sort(r).astype(np.int64), np.sort(s).astype(np.int64))
