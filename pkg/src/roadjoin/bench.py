"""Parameter-sweep benchmark: one parameter varies, the rest hold defaults.

Emits one CSV row per (parameter value, repetition) with wall time measured
around the query call only, the engine's work counters, and a checksum of
the sorted result so repetitions and parallelism levels can be checked for
agreement.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import time
from dataclasses import dataclass

from .errors import DomainError
from .graph import RoadNetwork, sample_sets
from .partition import SmoothingConfig, build_hierarchy
from .query import QueryParams, format_pairs
from .scheduler import Instrumentation, SchedulerConfig, closest_pairs_parallel

CSV_HEADER = "dataset,param,value,rep,wall_ms,expanded,settled,updates,checksum"

DEFAULT_ALPHA = 0.0
DEFAULT_PARALLELISM = 8
DEFAULT_K = 80
DEFAULT_R_PCT = 8.0
DEFAULT_S_PCT = 8.0


@dataclass(frozen=True)
class BenchSpec:
    """Value lists for each swept parameter plus repetition count and seed."""

    alpha_values: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    parallelism_values: tuple = (2, 4, 6, 8, 10, 12, 14)
    k_values: tuple = (20, 40, 60, 80, 100, 120, 140)
    r_pcts: tuple = (2, 4, 6, 8, 10, 12, 14)
    s_pcts: tuple = (2, 4, 6, 8, 10, 12, 14)
    repetitions: int = 3
    seed: int = 42

    def __post_init__(self):
        if self.repetitions < 1:
            raise DomainError("repetitions must be >= 1")

    @classmethod
    def from_file(cls, path) -> "BenchSpec":
        with open(path, "r", encoding="utf-8") as fh:
            raw = dict(json.load(fh))
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise DomainError(f"unknown bench spec fields: {sorted(unknown)}")
        for name in ("alpha_values", "parallelism_values", "k_values",
                     "r_pcts", "s_pcts"):
            if name in raw:
                raw[name] = tuple(raw[name])
        return cls(**raw)


@dataclass
class BenchRecord:
    dataset: str
    param: str
    value: object
    rep: int
    wall_ms: float
    expanded: int
    settled: int
    updates: int
    checksum: str

    def csv_row(self) -> str:
        return (f"{self.dataset},{self.param},{self.value},{self.rep},"
                f"{self.wall_ms:.3f},{self.expanded},{self.settled},"
                f"{self.updates},{self.checksum}")


def _result_checksum(heap) -> str:
    text = format_pairs(heap.items())
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


class _BenchContext:
    """Caches hierarchies per alpha and query sets per percentage pair."""

    def __init__(self, net: RoadNetwork, spec: BenchSpec, max_leaf_size: int):
        self.net = net
        self.spec = spec
        self.max_leaf_size = max_leaf_size
        self._hierarchies = {}
        self._sets = {}

    def hierarchy(self, alpha):
        if alpha not in self._hierarchies:
            self._hierarchies[alpha] = build_hierarchy(
                self.net, self.max_leaf_size, SmoothingConfig(alpha)
            )
        return self._hierarchies[alpha]

    def sets(self, r_pct, s_pct):
        key = (r_pct, s_pct)
        if key not in self._sets:
            self._sets[key] = sample_sets(self.net, r_pct, s_pct, self.spec.seed)
        return self._sets[key]

    def run_one(self, alpha, parallelism, k, r_pct, s_pct):
        hierarchy = self.hierarchy(alpha)
        q = self.sets(r_pct, s_pct)
        p = QueryParams(k=k, theta=math.inf)
        cfg = SchedulerConfig(parallelism=parallelism)
        instr = Instrumentation()
        start = time.perf_counter()
        heap = closest_pairs_parallel(self.net, hierarchy, q, p, cfg, instr=instr)
        wall_ms = (time.perf_counter() - start) * 1000.0
        return wall_ms, instr, _result_checksum(heap)


def sweep_configurations(spec: BenchSpec):
    """(param name, value, full configuration) for every sweep point."""
    base = {"alpha": DEFAULT_ALPHA, "parallelism": DEFAULT_PARALLELISM,
            "k": DEFAULT_K, "r_pct": DEFAULT_R_PCT, "s_pct": DEFAULT_S_PCT}
    sweeps = (
        ("alpha", spec.alpha_values),
        ("parallelism", spec.parallelism_values),
        ("k", spec.k_values),
        ("r_pct", spec.r_pcts),
        ("s_pct", spec.s_pcts),
    )
    for param, values in sweeps:
        for value in values:
            config = dict(base)
            config[param] = value
            yield param, value, config


def run_bench(net: RoadNetwork, dataset: str, spec: BenchSpec, out_path,
              max_leaf_size: int = 4096) -> int:
    """Run the full sweep, appending rows as they finish; returns row count.

    The CSV keeps its header stable: it is written only when the file is new
    or empty, so repeated runs append cleanly.  On failure the rows written
    so far remain on disk.
    """
    ctx = _BenchContext(net, spec, max_leaf_size)
    need_header = not (os.path.exists(out_path) and os.path.getsize(out_path) > 0)
    rows = 0
    with open(out_path, "a", encoding="utf-8", newline="") as fh:
        if need_header:
            fh.write(CSV_HEADER + "\n")
            fh.flush()
        for param, value, config in sweep_configurations(spec):
            for rep in range(spec.repetitions):
                wall_ms, instr, checksum = ctx.run_one(
                    config["alpha"], config["parallelism"], config["k"],
                    config["r_pct"], config["s_pct"],
                )
                record = BenchRecord(dataset, param, value, rep, wall_ms,
                                     instr.expanded_cross_edges,
                                     instr.settled_vertices,
                                     instr.threshold_updates, checksum)
                fh.write(record.csv_row() + "\n")
                fh.flush()
                rows += 1
    return rows
