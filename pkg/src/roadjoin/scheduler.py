"""Parallel orchestration of per-region work over the partition hierarchy.

The hierarchy is cut at query time into an antichain of "effective leaves"
sized to the requested parallelism.  Each effective leaf becomes a local
task; every ancestor becomes a merge task that runs once both children have
published their results.  A fixed pool of P workers drains the ready queue,
preferring tasks closest to the leaves so lower levels retire (and release
their resources) first.  All tasks share one atomically tightening distance
threshold, unless per-task local thresholds are requested.
"""
from __future__ import annotations

import heapq
import math
import os
import threading
from dataclasses import dataclass, field

from .errors import DomainError, RoadJoinError
from .graph import QuerySets, RoadNetwork
from .partition import PartitionHierarchy, PartitionNode
from .query import QueryParams, ResultHeap, combine_pairs, local_pairs


class GlobalThreshold:
    """Shared, monotonically non-increasing distance bound.

    Reads are lock-free and may be stale (staleness only loosens pruning);
    updates take the internal lock and apply an atomic min, so concurrent
    tightenings all land.
    """

    def __init__(self, initial=math.inf, record_trace=False):
        self._value = float(initial)
        self._lock = threading.Lock()
        self.updates = 0
        self.trace = [float(initial)] if record_trace else None

    @property
    def value(self) -> float:
        return self._value

    def tighten(self, candidate: float) -> float:
        """Lower the bound to ``candidate`` if smaller; returns the new value."""
        if candidate < 0:
            raise DomainError("threshold candidate must be >= 0")
        if candidate >= self._value:
            return self._value
        with self._lock:
            if candidate < self._value:
                self._value = candidate
                self.updates += 1
                if self.trace is not None:
                    self.trace.append(candidate)
            return self._value


def threshold_tighten(threshold: GlobalThreshold, candidate: float) -> float:
    return threshold.tighten(candidate)


class Instrumentation:
    """Thread-safe counters, plus optional event traces when ``trace=True``."""

    def __init__(self, trace=False):
        self._lock = threading.Lock()
        self.trace = trace
        self.expanded_cross_edges = 0
        self.settled_vertices = 0
        self.threshold_updates = 0
        self.peak_running = 0
        self._running = 0
        self.events = []            # ("start"|"finish", node_id) in observed order
        self.merge_log = {}         # (node_id, side) -> {"examined": [...], "break": ...}
        self.theta_trace = None

    def add_settled(self, count):
        with self._lock:
            self.settled_vertices += int(count)

    def count_expansion(self):
        with self._lock:
            self.expanded_cross_edges += 1

    def add_threshold_updates(self, count, trace=None):
        with self._lock:
            self.threshold_updates += int(count)
            if trace is not None:
                self.theta_trace = list(trace)

    def record_examined(self, node_id, side, ce, kth, expanded):
        if not self.trace:
            return
        with self._lock:
            log = self.merge_log.setdefault((node_id, side),
                                            {"examined": [], "break": None})
            log["examined"].append(
                {"eid": ce.eid, "weight": ce.weight, "kth": kth, "expanded": expanded}
            )

    def record_break(self, node_id, side, ce, kth):
        if not self.trace:
            return
        with self._lock:
            log = self.merge_log.setdefault((node_id, side),
                                            {"examined": [], "break": None})
            log["break"] = {"eid": ce.eid, "weight": ce.weight, "kth": kth}

    def task_started(self, node_id):
        with self._lock:
            self._running += 1
            self.peak_running = max(self.peak_running, self._running)
            if self.trace:
                self.events.append(("start", node_id))

    def task_finished(self, node_id):
        with self._lock:
            self._running -= 1
            if self.trace:
                self.events.append(("finish", node_id))

    def summary(self) -> str:
        return (f"expanded_cross_edges={self.expanded_cross_edges} "
                f"settled_vertices={self.settled_vertices} "
                f"threshold_updates={self.threshold_updates} "
                f"peak_parallelism={self.peak_running}")


@dataclass(frozen=True)
class SchedulerConfig:
    """Degree of parallelism P and the granularity factor c.

    The hierarchy is cut so that roughly c*P regions are processed locally.
    """

    parallelism: int = 8
    granularity_factor: int = 2

    def __post_init__(self):
        if self.parallelism < 1:
            raise DomainError("parallelism must be >= 1")
        if self.granularity_factor < 1:
            raise DomainError("granularity_factor must be >= 1")


def default_parallelism() -> int:
    """Parallelism from ROADJOIN_THREADS, or the SchedulerConfig default."""
    raw = os.environ.get("ROADJOIN_THREADS", "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise DomainError(f"ROADJOIN_THREADS must be an integer, got {raw!r}")
        if value < 1:
            raise DomainError("ROADJOIN_THREADS must be >= 1")
        return value
    return SchedulerConfig().parallelism


def choose_granularity(hierarchy: PartitionHierarchy,
                       cfg: SchedulerConfig) -> list[PartitionNode]:
    """Cut the hierarchy into the antichain of effective leaves.

    Descends from the root, always expanding the most populous frontier
    node, until the frontier holds at least c*P regions or only true leaves
    remain.  The returned nodes cover every vertex exactly once.
    """
    target = cfg.granularity_factor * cfg.parallelism
    root = hierarchy.root
    expandable = [(-root.population, root.id, root)] if not root.is_leaf else []
    finished = [root] if root.is_leaf else []
    while expandable and len(expandable) + len(finished) < target:
        _, _, node = heapq.heappop(expandable)
        for child in (node.left, node.right):
            if child.is_leaf:
                finished.append(child)
            else:
                heapq.heappush(expandable, (-child.population, child.id, child))
    frontier = finished + [entry[2] for entry in expandable]
    frontier.sort(key=lambda n: n.id)
    return frontier


@dataclass(eq=False)
class TaskNode:
    """One unit of work: local processing of a region, or a two-child merge."""

    node: PartitionNode
    kind: str                   # "leaf-work" | "merge-work"
    height: int                 # distance from the closest effective leaf
    pending: int = 0            # children still to finish (merge only)
    state: str = "pending"      # pending | ready | running | done
    parent: "TaskNode | None" = None
    result: tuple = field(default=None, repr=False)


def _build_tasks(hierarchy, frontier):
    tasks = {}
    for node in frontier:
        tasks[node.id] = TaskNode(node, "leaf-work", 0, state="ready")
    merge_ids = set()
    for node in frontier:
        pid = node.parent
        while pid is not None and pid not in merge_ids:
            merge_ids.add(pid)
            pid = hierarchy.nodes[pid].parent
    for nid in sorted(merge_ids, reverse=True):
        node = hierarchy.nodes[nid]
        left, right = tasks[node.left.id], tasks[node.right.id]
        task = TaskNode(node, "merge-work",
                        1 + min(left.height, right.height), pending=2)
        left.parent = right.parent = task
        tasks[nid] = task
    return tasks


def closest_pairs_parallel(net: RoadNetwork, hierarchy: PartitionHierarchy,
                           q: QuerySets, p: QueryParams,
                           cfg: SchedulerConfig | None = None,
                           threshold_mode: str = "global",
                           instr: Instrumentation | None = None) -> ResultHeap:
    """Run the full query over the hierarchy with at most P concurrent tasks.

    The returned heap holds the exact answer; its sorted contents do not
    depend on P, the scheduling interleaving, or the threshold mode.
    """
    cfg = cfg or SchedulerConfig()
    if threshold_mode not in ("global", "local"):
        raise DomainError(f"threshold_mode must be 'global' or 'local', "
                          f"got {threshold_mode!r}")
    frontier = choose_granularity(hierarchy, cfg)
    tasks = _build_tasks(hierarchy, frontier)
    shared = None
    if threshold_mode == "global":
        shared = GlobalThreshold(p.theta, record_trace=instr is not None and instr.trace)

    ready = [(t.height, t.node.id, t) for t in tasks.values() if t.state == "ready"]
    heapq.heapify(ready)
    cond = threading.Condition()
    done_count = [0]
    first_error = []
    total = len(tasks)
    root_task = tasks[hierarchy.root.id]

    def run_task(task):
        threshold = shared if shared is not None else GlobalThreshold(p.theta)
        if task.kind == "leaf-work":
            result = local_pairs(net, task.node, q, p, threshold, instr)
        else:
            left = tasks[task.node.left.id].result
            right = tasks[task.node.right.id].result
            result = combine_pairs(net, task.node, left, right, q, p,
                                   threshold, instr)
        if instr is not None and shared is None:
            instr.add_threshold_updates(threshold.updates)
        return result

    def worker():
        while True:
            with cond:
                while not ready and done_count[0] < total and not first_error:
                    cond.wait()
                if first_error or done_count[0] >= total:
                    return
                _, _, task = heapq.heappop(ready)
                task.state = "running"
            if instr is not None:
                instr.task_started(task.node.id)
            try:
                task.result = run_task(task)
            except BaseException as exc:  # noqa: BLE001 - propagated to caller
                with cond:
                    if not first_error:
                        first_error.append(exc)
                    cond.notify_all()
                return
            finally:
                if instr is not None:
                    instr.task_finished(task.node.id)
            with cond:
                task.state = "done"
                done_count[0] += 1
                parent = task.parent
                if parent is not None:
                    parent.pending -= 1
                    if parent.pending == 0:
                        parent.state = "ready"
                        heapq.heappush(ready, (parent.height, parent.node.id, parent))
                cond.notify_all()

    workers = [threading.Thread(target=worker, daemon=True)
               for _ in range(min(cfg.parallelism, total))]
    for w in workers:
        w.start()
    for w in workers:
        w.join()
    if first_error:
        raise first_error[0]
    if instr is not None and shared is not None:
        instr.add_threshold_updates(shared.updates, trace=shared.trace)
    heap, _ = root_task.result
    return heap
