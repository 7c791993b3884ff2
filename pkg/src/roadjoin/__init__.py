"""Parallel k-closest-pairs and distance joins over road networks.

The pipeline: load a network, bisect it recursively into well-separated
regions, then answer queries by processing regions concurrently and merging
results bottom-up across region boundaries under a shared pruning threshold.
"""

from .backend import available_backends, get_backend, set_backend
from .errors import (DomainError, FormatError, IntegrityError, ParseError,
                     RoadJoinError)
from .graph import QuerySets, RoadNetwork, load_network, sample_sets
from .oracle import oracle_closest_pairs
from .partition import (CrossEdge, PartitionHierarchy, PartitionNode,
                        SmoothingConfig, bisect, build_hierarchy,
                        load_hierarchy, save_hierarchy, select_seeds,
                        smoothed_weights)
from .query import (MatchPair, QueryParams, ResultHeap, combine_pairs,
                    distance_join, expand_cross_edge, format_pairs,
                    local_pairs)
from .scheduler import (GlobalThreshold, Instrumentation, SchedulerConfig,
                        TaskNode, choose_granularity, closest_pairs_parallel,
                        default_parallelism, threshold_tighten)
from .search import RegionGraph, bounded_dijkstra

__version__ = "0.1.0"

__all__ = [
    "available_backends", "get_backend", "set_backend",
    "RoadJoinError", "ParseError", "IntegrityError", "DomainError", "FormatError",
    "RoadNetwork", "QuerySets", "load_network", "sample_sets",
    "oracle_closest_pairs",
    "SmoothingConfig", "CrossEdge", "PartitionNode", "PartitionHierarchy",
    "smoothed_weights", "select_seeds", "bisect", "build_hierarchy",
    "save_hierarchy", "load_hierarchy",
    "MatchPair", "QueryParams", "ResultHeap", "local_pairs", "combine_pairs",
    "expand_cross_edge", "distance_join", "format_pairs",
    "GlobalThreshold", "Instrumentation", "SchedulerConfig", "TaskNode",
    "choose_granularity", "closest_pairs_parallel", "default_parallelism",
    "threshold_tighten",
    "RegionGraph", "bounded_dijkstra",
    "__version__",
]
