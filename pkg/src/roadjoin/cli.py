"""Command-line entry points: partition, query, oracle, sample-sets, bench.

All subcommands exchange vertex ids in the input files' original numbering.
Exit codes: 0 success, 1 runtime/input-data errors, 2 invalid flags or
flag-level constraint violations.
"""
from __future__ import annotations

import argparse
import math
import statistics
import sys
import time
from dataclasses import replace

import numpy as np

from .bench import BenchSpec, run_bench
from .errors import ParseError, RoadJoinError
from .graph import QuerySets, load_network, sample_sets
from .oracle import oracle_closest_pairs
from .partition import SmoothingConfig, build_hierarchy, load_hierarchy, save_hierarchy
from .query import QueryParams, format_pairs
from .scheduler import Instrumentation, SchedulerConfig, closest_pairs_parallel, \
    default_parallelism


def _alpha_flag(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be within [0, 1], got {value}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _pct_flag(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not 0.0 <= value <= 100.0:
        raise argparse.ArgumentTypeError(f"must be within [0, 100], got {value}")
    return value


def _nonneg_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if value < 0 or math.isnan(value):
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text!r}")
    return value


def _read_id_file(path):
    ids = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                ids.append(int(line))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: expected a vertex id, "
                                 f"got {line!r}") from None
    return ids


def _write_output(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(message) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def cmd_partition(args) -> int:
    net = load_network(args.nodes, args.edges)
    hierarchy = build_hierarchy(net, args.max_leaf_size, SmoothingConfig(args.alpha))
    save_hierarchy(hierarchy, args.out)
    leaves = hierarchy.leaves()
    seps = [n.separation_degree for n in hierarchy.nodes
            if math.isfinite(n.separation_degree)]
    pops = sorted(n.population for n in leaves)
    imbalances = [abs(n.left.population - n.right.population)
                  for n in hierarchy.nodes if not n.is_leaf]
    print(f"nodes={len(hierarchy.nodes)} leaves={len(leaves)} "
          f"min_separation={min(seps) if seps else math.inf:.9g}")
    if pops:
        print(f"leaf_population: min={pops[0]} median={pops[len(pops) // 2]} "
              f"max={pops[-1]}")
    if imbalances:
        print(f"sibling_imbalance: max={max(imbalances)} "
              f"mean={statistics.mean(imbalances):.1f}")
    return 0


def _load_query_sets(args, net):
    r_orig = _read_id_file(args.r_set)
    s_orig = _read_id_file(args.s_set)
    r = net.dense_ids(r_orig)
    s = net.dense_ids(s_orig)
    overlap = np.intersect1d(r, s)
    if overlap.size:
        orig = int(net.original_ids[overlap[0]])
        print(f"error: sets R and S must be disjoint (vertex {orig} appears in both)",
              file=sys.stderr)
        raise SystemExit(2)
    return QuerySets.from_ids(r, s, net.num_vertices)


def cmd_query(args, parser) -> int:
    net = load_network(args.nodes, args.edges)
    hierarchy = load_hierarchy(args.hier)
    q = _load_query_sets(args, net)
    if args.join and not math.isfinite(args.theta):
        parser.error("--join requires a finite --theta")
    if args.join and args.theta == 0:
        _write_output("", args.out)
        print("wall_ms=0.000 " + Instrumentation().summary(), file=sys.stderr)
        return 0
    p = QueryParams(k=None if args.join else args.k, theta=args.theta)
    threads = args.threads if args.threads is not None else default_parallelism()
    cfg = SchedulerConfig(parallelism=threads)
    instr = Instrumentation()
    start = time.perf_counter()
    heap = closest_pairs_parallel(net, hierarchy, q, p, cfg,
                                  threshold_mode=args.threshold_mode, instr=instr)
    wall_ms = (time.perf_counter() - start) * 1000.0
    _write_output(format_pairs(heap.items(), id_map=net.original_ids), args.out)
    print(f"wall_ms={wall_ms:.3f} {instr.summary()}", file=sys.stderr)
    return 0


def cmd_oracle(args, parser) -> int:
    net = load_network(args.nodes, args.edges)
    q = _load_query_sets(args, net)
    if args.join and not math.isfinite(args.theta):
        parser.error("--join requires a finite --theta")
    if args.join and args.theta == 0:
        _write_output("", args.out)
        return 0
    pairs = oracle_closest_pairs(net, q, k=None if args.join else args.k,
                                 theta=args.theta)
    _write_output(format_pairs(pairs, id_map=net.original_ids), args.out)
    return 0


def cmd_sample_sets(args) -> int:
    net = load_network(args.nodes, args.edges)
    q = sample_sets(net, args.r_pct, args.s_pct, args.seed)
    for path, ids in ((args.r_out, q.r), (args.s_out, q.s)):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            for v in ids:
                fh.write(f"{int(net.original_ids[v])}\n")
    print(f"r_size={len(q.r)} s_size={len(q.s)}")
    return 0


def cmd_bench(args) -> int:
    net = load_network(args.nodes, args.edges)
    spec = BenchSpec.from_file(args.spec) if args.spec else BenchSpec()
    if args.repetitions is not None:
        spec = replace(spec, repetitions=args.repetitions)
    dataset = args.dataset
    rows = run_bench(net, dataset, spec, args.out, args.max_leaf_size)
    print(f"rows={rows} out={args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roadjoin",
        description="Partitioned parallel closest-pairs and distance joins "
                    "on road networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_network_flags(p):
        p.add_argument("--nodes", required=True, help="node file: '<id> <x> <y>' lines")
        p.add_argument("--edges", required=True,
                       help="edge file: '<eid> <a> <b> <weight>' lines")

    p_part = sub.add_parser("partition", help="build and save a partition hierarchy")
    add_network_flags(p_part)
    p_part.add_argument("--alpha", type=_alpha_flag, default=0.0,
                        help="population smoothing in [0,1] (default 0.0)")
    p_part.add_argument("--max-leaf-size", type=_positive_int, default=4096)
    p_part.add_argument("--out", required=True, help="hierarchy output file")
    p_part.set_defaults(func=cmd_partition)

    def add_query_flags(p, with_engine):
        add_network_flags(p)
        p.add_argument("--r-set", required=True, help="file of R vertex ids")
        p.add_argument("--s-set", required=True, help="file of S vertex ids")
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--k", type=_positive_int, help="number of closest pairs")
        group.add_argument("--join", action="store_true",
                           help="distance join: all pairs within --theta")
        p.add_argument("--theta", type=_nonneg_float, default=math.inf,
                       help="distance bound (default unbounded)")
        p.add_argument("--out", help="result file (default stdout)")
        if with_engine:
            p.add_argument("--hier", required=True, help="hierarchy file")
            p.add_argument("--threads", type=_positive_int, default=None,
                           help="parallelism (default ROADJOIN_THREADS or 8)")
            p.add_argument("--threshold-mode", choices=("global", "local"),
                           default="global")

    p_query = sub.add_parser("query", help="run a query through the hierarchy")
    add_query_flags(p_query, with_engine=True)
    p_query.set_defaults(func=lambda a: cmd_query(a, p_query))

    p_oracle = sub.add_parser("oracle", help="brute-force reference answer")
    add_query_flags(p_oracle, with_engine=False)
    p_oracle.set_defaults(func=lambda a: cmd_oracle(a, p_oracle))

    p_samp = sub.add_parser("sample-sets", help="sample disjoint R and S id files")
    add_network_flags(p_samp)
    p_samp.add_argument("--r-pct", type=_pct_flag, required=True)
    p_samp.add_argument("--s-pct", type=_pct_flag, required=True)
    p_samp.add_argument("--seed", type=int, default=42)
    p_samp.add_argument("--r-out", required=True)
    p_samp.add_argument("--s-out", required=True)
    p_samp.set_defaults(func=cmd_sample_sets)

    p_bench = sub.add_parser("bench", help="parameter-sweep benchmark to CSV")
    add_network_flags(p_bench)
    p_bench.add_argument("--dataset", required=True, help="dataset name for the CSV")
    p_bench.add_argument("--spec", help="JSON bench spec (defaults to the standard sweep)")
    p_bench.add_argument("--out", required=True, help="CSV output path (appends)")
    p_bench.add_argument("--max-leaf-size", type=_positive_int, default=4096)
    p_bench.add_argument("--repetitions", type=_positive_int, default=None)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RoadJoinError, OSError) as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
