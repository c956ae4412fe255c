"""Command line entry point: ``biasnet <command> ...``.

Exit status is 0 on success, 1 on usage errors and 2 on data errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from .experiment import aggregate, run_sweep
from .graph import GraphError, group_stats
from .io import (
    ConfigError,
    DataError,
    load_config,
    load_dataset,
    load_records,
    save_aggregates,
    save_curve,
    save_records,
    write_edge_list,
    write_id_map,
    write_labels,
)
from .metrics import partition_report
from .netgen import GenParams, generate
from .noise import NOISE_TYPES, NoiseSpecError, apply_noise, expected_retained, make_spec, param_name_for, retain_probs
from .plot import plot_sweep
from .ranking import DEFAULT_K_MIN, default_k, degree_ranking, group_ccdf, minority_fraction_curve, topk_minority_fraction

log = logging.getLogger("biasnet")

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return value


def _add_graph_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", required=True, type=Path, help="edge list, one 'u v' pair per line")
    p.add_argument("--labels", required=True, type=Path, help="label file, one 'node label' pair per line")
    p.add_argument("--minority", help="label value to treat as the minority group")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="biasnet", description="Systematic edge noise and minority representation in rankings.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="grow a homophilic preferential attachment graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--f", type=_probability, required=True, help="minority fraction")
    p.add_argument("--h", type=_probability, required=True, help="homophily")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", required=True, type=Path)

    p = sub.add_parser("perturb", help="sample an observed graph under a noise model")
    _add_graph_inputs(p)
    p.add_argument("--noise", required=True, choices=NOISE_TYPES)
    p.add_argument("--p", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--other", type=float, help="retain probability of untargeted edges (presets only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("rank", help="top-k minority fraction of the degree ranking")
    _add_graph_inputs(p)
    p.add_argument("--k", type=int, help="ranking cut (default: 1%% of nodes)")
    p.add_argument("--seed", type=int, default=0, help="tie-break seed")
    p.add_argument("--curve", type=Path, help="write the k-curve CSV here")
    p.add_argument("--k-min", type=int, default=DEFAULT_K_MIN)
    p.add_argument("--k-max", type=int)
    p.add_argument("--ccdf", type=Path, help="write the per-group degree CCDF CSV here")

    p = sub.add_parser("stats", help="size, minority fraction, modularity and assortativity of the labels")
    _add_graph_inputs(p)

    p = sub.add_parser("sweep", help="run a Monte Carlo sweep from a JSON config")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", type=Path, help="CSV output (overrides the config's 'out')")
    p.add_argument("--aggregate", type=Path, help="also write per-grid-point aggregates here")
    p.add_argument("--threads", type=int, help="worker processes (default: $BIASNET_THREADS or CPU count)")

    p = sub.add_parser("plot", help="SVG charts from a sweep CSV")
    p.add_argument("--csv", required=True, type=Path)
    p.add_argument("--out-dir", required=True, type=Path)
    return parser


def _load(args):
    ds = load_dataset(args.edges, args.labels, minority=args.minority)
    log.info(ds.report.summary())
    return ds


def cmd_generate(args) -> None:
    try:
        params = GenParams(n=args.n, m=args.m, f=args.f, h=args.h, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    g = generate(params)
    prefix = args.out_prefix
    write_edge_list(f"{prefix}.edges", g)
    write_labels(f"{prefix}.labels", g)
    print(f"wrote {prefix}.edges and {prefix}.labels ({g.n} nodes, {g.n_edges} edges)")


def cmd_perturb(args) -> None:
    name = param_name_for(args.noise)
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"--noise {args.noise} needs --{name}")
    try:
        spec = make_spec(args.noise, value, args.other)
    except NoiseSpecError as exc:
        raise UsageError(str(exc)) from None
    ds = _load(args)
    probs = retain_probs(ds.graph, spec)
    observed = apply_noise(ds.graph, probs, args.seed)
    write_edge_list(args.out, observed, ds.node_ids)
    if ds.remapped:
        write_id_map(f"{args.out}.idmap", ds.node_ids)
    print(f"latent_edges\t{ds.graph.n_edges}")
    print(f"retained_edges\t{observed.n_edges}")
    print(f"expected_retained\t{expected_retained(probs):.3f}")


def cmd_rank(args) -> None:
    ds = _load(args)
    g = ds.graph
    k = default_k(g.n) if args.k is None else args.k
    if not 1 <= k <= g.n:
        raise UsageError(f"--k must lie in [1, {g.n}]")
    ranking = degree_ranking(g, args.seed)
    print(f"k\t{k}")
    print(f"tie_seed\t{args.seed}")
    print(f"topk_minority_fraction\t{topk_minority_fraction(ranking, g.labels, k):.6g}")
    if args.curve:
        try:
            curve = minority_fraction_curve(ranking, g.labels, args.k_min, args.k_max)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        save_curve(args.curve, ("k", "minority_fraction"), curve)
    if args.ccdf:
        ccdf = group_ccdf(g)
        groups = sorted(ccdf.curves)
        n_x = max(len(c) for c in ccdf.curves.values())
        rows = [[x] + [float(ccdf.curves[grp][x]) for grp in groups] for x in range(n_x)]
        save_curve(args.ccdf, ["x"] + [("majority", "minority")[grp] for grp in groups], rows)


def cmd_stats(args) -> None:
    ds = _load(args)
    if ds.graph.n_edges == 0:
        raise DataError("graph has no edges")
    report = partition_report(ds.graph)
    stats = group_stats(ds.graph)
    print(report.format())
    print(f"edges_intra_majority\t{stats.intra_majority}")
    print(f"edges_intra_minority\t{stats.intra_minority}")
    print(f"edges_inter\t{stats.inter}")


def cmd_sweep(args) -> None:
    cfg = load_config(args.config)
    out = args.out or cfg.out
    if out is None:
        raise UsageError("no output path: pass --out or set 'out' in the config")
    records = run_sweep(cfg, workers=args.threads)
    save_records(out, records)
    print(f"wrote {len(records)} records to {out}")
    if args.aggregate:
        save_aggregates(args.aggregate, aggregate(records))


def cmd_plot(args) -> None:
    records = load_records(args.csv)
    for path in plot_sweep(records, args.out_dir):
        print(path)


COMMANDS = {
    "generate": cmd_generate,
    "perturb": cmd_perturb,
    "rank": cmd_rank,
    "stats": cmd_stats,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"biasnet {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, GraphError, OSError, ValueError) as exc:
        print(f"biasnet {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
