"""Command-line driver for the offline pipeline.

Data goes only to the declared output paths; progress and telemetry go to
standard error. Every command is deterministic given its inputs and seed.
"""

import argparse
import sys

from .analytics import (
    clique_report,
    clique_report_tsv,
    diversity_comparison,
    diversity_comparison_tsv,
    homophily_report_tsv,
    homophily_stats,
)
from .catalog import load_catalog
from .config import PipelineConfig
from .errors import TginError
from .graph import build_graph, load_behavior_log, load_graph, save_graph
from .index_io import write_index
from .pipeline import build_index
from .selfcheck import run_selftest


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _config_from(args) -> PipelineConfig:
    cfg = PipelineConfig.from_file(args.config) if getattr(args, "config", None) \
        else PipelineConfig()
    overrides = {}
    for flag, name in [("window", "window"), ("n", "triangles_per_item"),
                       ("theta", "theta"), ("max_order", "max_order"),
                       ("neighbor_cap", "neighbor_cap"),
                       ("candidate_cap", "candidate_cap"),
                       ("bloom_bits", "bloom_bits_per_edge"),
                       ("bloom_hashes", "bloom_hashes"),
                       ("workers", "workers"), ("seed", "seed")]:
        if hasattr(args, flag):
            overrides[name] = getattr(args, flag)
    return cfg.override(**overrides)


def cmd_build_graph(args) -> int:
    cfg = _config_from(args)
    log = load_behavior_log(args.log)
    g = build_graph(log, cfg.window, cfg.bloom_bits_per_edge, cfg.bloom_hashes)
    save_graph(g, args.out)
    _log(f"graph: {len(g.nodes)} nodes, {len(g.edges)} edges, "
         f"window {cfg.window} -> {args.out}")
    return 0


def cmd_build_index(args) -> int:
    cfg = _config_from(args)
    g = load_graph(args.graph, cfg.bloom_bits_per_edge, cfg.bloom_hashes)
    catalog = load_catalog(args.catalog)
    index = build_index(g, catalog, cfg, log=_log)
    n_bytes = write_index(index, args.out)
    _log(f"index: {len(index.entries)} entries, {n_bytes} bytes -> {args.out}")
    return 0


def cmd_stats(args) -> int:
    cfg = _config_from(args)
    g = load_graph(args.graph, cfg.bloom_bits_per_edge, cfg.bloom_hashes)
    catalog = load_catalog(args.catalog) if getattr(args, "catalog", None) else None

    if args.report == "homophily":
        report = homophily_stats(g, catalog, args.items, args.triangles_per_item,
                                 cfg.seed, max_order=cfg.max_order,
                                 neighbor_cap=cfg.neighbor_cap)
        text = homophily_report_tsv(report)
        _log(f"homophily: {report.sample_size} triangles examined")
    elif args.report == "clique":
        report = clique_report(g, catalog, args.trials, cfg.seed,
                               node_cap=args.node_cap)
        text = clique_report_tsv(report)
        _log(f"clique: {report.trials} trials per size")
    else:
        report = diversity_comparison(g, catalog, args.attribute, args.items,
                                      cfg.triangles_per_item, cfg.theta, cfg.seed,
                                      max_order=cfg.max_order,
                                      neighbor_cap=cfg.neighbor_cap)
        text = diversity_comparison_tsv(report)
        _log(f"diversity: attribute {args.attribute!r} over {args.items} items")
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return 0


def cmd_selftest(args) -> int:
    return run_selftest(fast=args.fast)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tgin",
        description="Offline triangle-interest pipeline over item co-occurrence graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="JSON config file; flags win")

    p = sub.add_parser("build-graph", help="build a co-occurrence graph from a behavior log")
    p.add_argument("--log", required=True, help="behavior log TSV")
    p.add_argument("--out", required=True, help="graph file destination")
    p.add_argument("--window", type=int, help="sliding window size (default 3)")
    p.add_argument("--bloom-bits", type=int, dest="bloom_bits",
                   help="bloom filter bits per edge (default 10)")
    p.add_argument("--bloom-hashes", type=int, dest="bloom_hashes",
                   help="bloom filter hash count (default 7)")
    add_config(p)
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("build-index", help="extract, score and select triangles per item")
    p.add_argument("--graph", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--out", required=True, help="index file destination (.gz to compress)")
    p.add_argument("--n", type=int, help="triangles per (item, order) (default 10)")
    p.add_argument("--theta", type=float, help="relevance/diversity trade-off (default 0.5)")
    p.add_argument("--max-order", type=int, dest="max_order",
                   help="highest triangle order (default 2)")
    p.add_argument("--neighbor-cap", type=int, dest="neighbor_cap",
                   help="per-node neighbor list cap (default 200)")
    p.add_argument("--candidate-cap", type=int, dest="candidate_cap",
                   help="per-(item, order) candidate cap before selection (default 400)")
    p.add_argument("--workers", type=int, help="parallel workers (default: CPU count)")
    add_config(p)
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("stats", help="motif statistics reports")
    stats_sub = p.add_subparsers(dest="report", required=True)

    ph = stats_sub.add_parser("homophily", help="attribute sharing inside triangles")
    ph.add_argument("--graph", required=True)
    ph.add_argument("--catalog", required=True)
    ph.add_argument("--out", required=True)
    ph.add_argument("--items", type=int, default=1000, help="items to sample")
    ph.add_argument("--triangles-per-item", type=int, default=50,
                    dest="triangles_per_item")
    ph.add_argument("--max-order", type=int, dest="max_order")
    ph.add_argument("--seed", type=int)
    add_config(ph)
    ph.set_defaults(func=cmd_stats)

    pc = stats_sub.add_parser("clique", help="k-clique occurrence and homophily")
    pc.add_argument("--graph", required=True)
    pc.add_argument("--catalog")
    pc.add_argument("--out", required=True)
    pc.add_argument("--trials", type=int, default=100000)
    pc.add_argument("--node-cap", type=int, dest="node_cap",
                    help="restrict sampling to this many nodes")
    pc.add_argument("--seed", type=int)
    add_config(pc)
    pc.set_defaults(func=cmd_stats)

    pd = stats_sub.add_parser("diversity",
                              help="distinct attribute values: diverse vs weighted sampling")
    pd.add_argument("--graph", required=True)
    pd.add_argument("--catalog", required=True)
    pd.add_argument("--out", required=True)
    pd.add_argument("--attribute", default="keyword")
    pd.add_argument("--items", type=int, default=200, help="items to sample")
    pd.add_argument("--n", type=int, help="triangles per (item, order) (default 10)")
    pd.add_argument("--theta", type=float)
    pd.add_argument("--max-order", type=int, dest="max_order")
    pd.add_argument("--seed", type=int)
    add_config(pd)
    pd.set_defaults(func=cmd_stats)

    p = sub.add_parser("selftest", help="run built-in oracle suites on generated fixtures")
    p.add_argument("--fast", action="store_true", help="reduced fixture sizes")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TginError as exc:
        _log(f"error: {exc}")
        return 2
    except OSError as exc:
        _log(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
