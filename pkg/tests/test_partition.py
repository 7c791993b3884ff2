"""Bisection, hierarchy invariants, and hierarchy file round-trips."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from roadjoin import (DomainError, FormatError, RoadNetwork, SmoothingConfig,
                      bisect, build_hierarchy, load_hierarchy, save_hierarchy,
                      select_seeds, smoothed_weights)

from conftest import (edge_list, grid_network, path_network,
                      random_connected_network, reference_distances)


# -- smoothed weights ---------------------------------------------------------

def test_smoothing_alpha_zero_is_identity():
    assert smoothed_weights(7.0, 3.0, 5, 99, 0.0) == (7.0, 3.0)


def test_smoothing_alpha_one_equal_populations():
    assert smoothed_weights(4.0, 6.0, 10, 10, 1.0) == (2.0, 3.0)


def test_smoothing_direct_evaluation():
    w1, w2 = smoothed_weights(4.0, 4.0, 3, 1, 0.5)
    assert w1 == 4.0 * 3 / 3.5
    assert w2 == 4.0 * 1 / 2.5


def test_smoothing_validation():
    with pytest.raises(DomainError):
        smoothed_weights(1.0, 1.0, 1, 1, 1.5)
    with pytest.raises(DomainError):
        smoothed_weights(1.0, 1.0, 0, 1, 0.5)
    with pytest.raises(DomainError):
        smoothed_weights(-1.0, 1.0, 1, 1, 0.5)
    with pytest.raises(DomainError):
        SmoothingConfig(-0.1)


@given(st.floats(0, 1), st.floats(0, 100), st.floats(0, 100),
       st.integers(1, 10**6), st.integers(1, 10**6))
def test_smoothing_closed_form(alpha, w1, w2, p1, p2):
    got = smoothed_weights(w1, w2, p1, p2, alpha)
    assert got == (p1 / (p1 + alpha * p2) * w1, p2 / (alpha * p1 + p2) * w2)


# -- seed selection -----------------------------------------------------------

def test_seeds_on_path_are_endpoints():
    net = path_network([1.0, 1.0, 1.0])
    assert sorted(select_seeds(net, np.arange(4))) == [0, 3]


def test_seeds_two_vertices():
    net = path_network([2.5])
    assert sorted(select_seeds(net, np.arange(2))) == [0, 1]


def test_seeds_grid_reach_most_of_diameter(rng):
    net = grid_network(6, 6)
    edges = edge_list(net)
    all_dist = {
        v: reference_distances(36, edges, v) for v in range(36)
    }
    diameter = max(max(d.values()) for d in all_dist.values())
    a, b = select_seeds(net, np.arange(36))
    assert a != b
    assert all_dist[a][b] >= 0.8 * diameter


def test_seeds_need_two_vertices():
    net = path_network([1.0])
    with pytest.raises(DomainError):
        select_seeds(net, np.asarray([0]))


# -- bisection ----------------------------------------------------------------

def _fresh_root(net):
    return build_hierarchy(net, net.num_vertices).root


def test_bisect_heavy_middle_path():
    net = path_network([1.0, 9.0, 1.0])
    left, right = bisect(net, _fresh_root(net), 0, 3, SmoothingConfig(0.0))
    assert left.vertices.tolist() == [0, 1]
    assert right.vertices.tolist() == [2, 3]
    assert [ce.eid for ce in left.cross_edges] == [1]
    assert left.cross_edges[0].back == 1 and left.cross_edges[0].front == 2
    assert right.cross_edges[0].back == 2 and right.cross_edges[0].front == 1
    assert left.separation_degree == 9.0 == right.separation_degree


def test_bisect_two_vertices_forced():
    net = path_network([4.0])
    left, right = bisect(net, _fresh_root(net), 0, 1, SmoothingConfig(0.0))
    assert left.vertices.tolist() == [0] and right.vertices.tolist() == [1]
    assert [ce.eid for ce in left.cross_edges] == [0]
    assert left.separation_degree == 4.0


def test_bisect_cycle_heavy_boundary():
    net = RoadNetwork.from_edges(
        4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 5.0), (3, 0, 5.0)]
    )
    left, right = bisect(net, _fresh_root(net), 3, 1, SmoothingConfig(0.0))
    assert left.vertices.tolist() == [3]
    assert right.vertices.tolist() == [0, 1, 2]
    assert sorted(ce.eid for ce in left.cross_edges) == [2, 3]
    assert left.separation_degree == 5.0


def test_bisect_seed_validation():
    net = path_network([1.0, 1.0])
    root = _fresh_root(net)
    with pytest.raises(DomainError):
        bisect(net, root, 0, 0, SmoothingConfig())
    with pytest.raises(DomainError):
        bisect(net, root, 0, 9, SmoothingConfig())


def test_bisect_disconnected_region_assigns_leftovers():
    # component {0,1} holds both seeds; {2,3,4} is unreachable from them and
    # must land whole on the (smaller, tie -> left) side
    net = RoadNetwork.from_edges(5, [(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0)])
    left, right = bisect(net, _fresh_root(net), 0, 1, SmoothingConfig(0.0))
    assert left.vertices.tolist() == [0, 2, 3, 4]
    assert right.vertices.tolist() == [1]
    assert left.separation_degree == 1.0


def test_path_maximality_single_heaviest_cross_edge(rng):
    # distinct weights, endpoint seeds, no smoothing: the one surviving
    # boundary edge is the heaviest edge of the path
    for _ in range(50):
        m = int(rng.integers(2, 40))
        weights = (rng.permutation(m) + 1).astype(float)
        net = path_network(list(weights))
        left, right = bisect(net, _fresh_root(net), 0, m, SmoothingConfig(0.0))
        boundary = [ce for ce in left.cross_edges]
        assert len(boundary) == 1
        assert boundary[0].weight == max(weights)
        assert left.separation_degree == max(weights)


def test_balance_monotonicity_alpha_one_vs_zero():
    # heavy edge far off-center: alpha=0 cuts there (lopsided), alpha=1 must
    # not be more lopsided
    weights = [1.0] * 9 + [50.0] + [1.0] * 2
    net = path_network(weights)
    imbalance = {}
    for alpha in (0.0, 1.0):
        left, right = bisect(net, _fresh_root(net), 0, len(weights),
                             SmoothingConfig(alpha))
        imbalance[alpha] = abs(left.population - right.population)
    assert imbalance[1.0] <= imbalance[0.0]


def test_weight_scaling_leaves_assignments_unchanged(rng):
    net = random_connected_network(rng, 150)
    for alpha in (0.0, 0.5, 1.0):
        base = build_hierarchy(net, 16, SmoothingConfig(alpha))
        for c in (0.25, 8.0):  # powers of two scale exactly
            scaled_net = RoadNetwork.from_edges(
                net.num_vertices,
                [(int(net.edge_a[e]), int(net.edge_b[e]),
                  float(net.edge_weight[e]) * c) for e in range(net.num_edges)],
            )
            scaled = build_hierarchy(scaled_net, 16, SmoothingConfig(alpha))
            assert len(base.nodes) == len(scaled.nodes)
            for a, b in zip(base.nodes, scaled.nodes):
                assert np.array_equal(a.vertices, b.vertices)


# -- hierarchy construction ---------------------------------------------------

def test_hierarchy_single_leaf_when_limit_covers_graph(rng):
    net = random_connected_network(rng, 10)
    h = build_hierarchy(net, 10)
    assert len(h.nodes) == 1
    assert h.root.is_leaf
    assert h.root.population == 10


def test_hierarchy_balanced_path():
    net = path_network([1.0] * 7)
    h = build_hierarchy(net, 2, SmoothingConfig(1.0))
    assert len(h.nodes) == 7
    leaves = sorted(tuple(l.vertices.tolist()) for l in h.leaves())
    assert leaves == [(0, 1), (2, 3), (4, 5), (6, 7)]
    depths = set()
    for leaf in h.leaves():
        d = 0
        node = leaf
        while node.parent is not None:
            node = h.nodes[node.parent]
            d += 1
        depths.add(d)
    assert depths == {2}


def expected_cross_edges(net, node):
    inside = np.zeros(net.num_vertices, dtype=bool)
    inside[node.vertices] = True
    out = set()
    for e in range(net.num_edges):
        a, b = int(net.edge_a[e]), int(net.edge_b[e])
        if inside[a] != inside[b]:
            back, front = (a, b) if inside[a] else (b, a)
            out.add((e, back, front, float(net.edge_weight[e])))
    return out


def test_hierarchy_invariants_on_random_graphs(rng):
    for trial in range(6):
        n = int(rng.integers(30, 200))
        net = random_connected_network(rng, n)
        alpha = (0.0, 0.5, 1.0)[trial % 3]
        h = build_hierarchy(net, 16, SmoothingConfig(alpha))
        covered = np.zeros(n, dtype=int)
        for leaf in h.leaves():
            assert leaf.population <= 16
            covered[leaf.vertices] += 1
        assert (covered == 1).all()
        for node in h.nodes:
            if not node.is_leaf:
                assert np.intersect1d(node.left.vertices,
                                      node.right.vertices).size == 0
                union = np.union1d(node.left.vertices, node.right.vertices)
                assert np.array_equal(union, node.vertices)
            maintained = {(ce.eid, ce.back, ce.front, ce.weight)
                          for ce in node.cross_edges}
            assert maintained == expected_cross_edges(net, node)
            keys = [(ce.weight, ce.eid) for ce in node.cross_edges]
            assert keys == sorted(keys)


def test_hierarchy_limit_validation(rng):
    net = random_connected_network(rng, 10)
    with pytest.raises(DomainError):
        build_hierarchy(net, 0)


# -- serialization ------------------------------------------------------------

def test_round_trip_structural_equality(rng, tmp_path):
    net = random_connected_network(rng, 120)
    h = build_hierarchy(net, 16, SmoothingConfig(0.5))
    path = tmp_path / "h.json"
    save_hierarchy(h, path)
    loaded = load_hierarchy(path)
    assert h.structurally_equal(loaded)
    assert loaded.structurally_equal(h)


def test_round_trip_eight_path(tmp_path):
    net = path_network([1.0] * 7)
    h = build_hierarchy(net, 2, SmoothingConfig(1.0))
    path = tmp_path / "h.json"
    save_hierarchy(h, path)
    assert load_hierarchy(path).structurally_equal(h)


def test_load_empty_file_is_format_error(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("")
    with pytest.raises(FormatError):
        load_hierarchy(path)


def test_load_corrupted_file_is_format_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"version": 1, "nodes": [{"id": 5}]}')
    with pytest.raises(FormatError):
        load_hierarchy(path)


def test_load_version_mismatch_is_format_error(tmp_path, rng):
    net = random_connected_network(rng, 20)
    h = build_hierarchy(net, 8)
    path = tmp_path / "h.json"
    save_hierarchy(h, path)
    text = path.read_text().replace('"version": 1', '"version": 99')
    path.write_text(text)
    with pytest.raises(FormatError, match="version"):
        load_hierarchy(path)
