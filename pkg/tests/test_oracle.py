"""Brute-force oracle checked against the independent quadratic reference."""
from __future__ import annotations

import math

import pytest

from roadjoin import DomainError, QuerySets, oracle_closest_pairs, sample_sets

from conftest import (grid_network, path_network, random_connected_network,
                      reference_pairs)


def test_k_zero_is_empty(rng):
    net = random_connected_network(rng, 30)
    q = sample_sets(net, 10, 10, seed=0)
    assert oracle_closest_pairs(net, q, k=0) == []


def test_single_path():
    net = path_network([1.0, 2.0])
    q = QuerySets.from_ids([0], [2])
    pairs = oracle_closest_pairs(net, q, k=1)
    assert [(p.r, p.s, p.dist) for p in pairs] == [(0, 2, 3.0)]


def test_grid_top_k_matches_exhaustive_enumeration(rng):
    net = grid_network(5, 5, rng=rng)
    q = QuerySets.from_ids([0, 7, 13], [24, 16, 4])
    want = reference_pairs(net, q.r, q.s)[:4]
    got = oracle_closest_pairs(net, q, k=4)
    assert [(p.dist, p.r, p.s) for p in got] == want


def test_sorted_and_theta_filtered(rng):
    net = random_connected_network(rng, 80)
    q = sample_sets(net, 10, 10, seed=4)
    all_pairs = oracle_closest_pairs(net, q, k=None, theta=50.0)
    dists = [p.dist for p in all_pairs]
    assert dists == sorted(dists)
    assert all(d <= 50.0 for d in dists)
    theta = dists[len(dists) // 2]
    capped = oracle_closest_pairs(net, q, k=None, theta=theta)
    assert [(p.dist, p.r, p.s) for p in capped] == \
        [(p.dist, p.r, p.s) for p in all_pairs if p.dist <= theta]


def test_unreachable_pairs_never_match():
    # two disconnected path components
    from roadjoin import RoadNetwork

    net = RoadNetwork.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)])
    q = QuerySets.from_ids([0], [3])
    assert oracle_closest_pairs(net, q, k=5) == []


def test_validation():
    net = path_network([1.0])
    q = QuerySets.from_ids([0], [1])
    with pytest.raises(DomainError):
        oracle_closest_pairs(net, q, k=-1)
    with pytest.raises(DomainError):
        oracle_closest_pairs(net, q, k=1, theta=0.0)
