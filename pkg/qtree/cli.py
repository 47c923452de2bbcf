"""Command-line entry point: ``qtree <subcommand> [flags]``.

Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
3 size guard, 4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import _constants as C
from .config import (
    ANALYSES,
    FORMATS,
    SweepConfig,
    apply_config,
    parse_float_list,
    parse_int_list,
    parse_kinds,
    read_config,
    resolve_workers,
)
from .errors import InvalidParameterError, SizeGuardError
from .fidelity_engine import (
    FidelityMethod,
    favg_closed,
    favg_closed_nodes,
    favg_from_census,
    favg_weighted,
    uniform_network,
)
from .log import configure_logging
from .monte_carlo import expectation_check, reference_draws, run_trials, table_comparison, trial_weights
from .network_analysis import (
    PlacementStrategy,
    advantage_threshold,
    asymptotic_profile,
    me_curve,
    me_placement,
    me_threshold,
    threshold_table,
)
from .output import open_output, write_csv, write_json, write_rows, write_table
from .path_census import CensusMethod, census_closed_form, census_enumerate
from .topology import TreeKind, build_tree, depth_from_nodes, node_count
from .verify import LEVELS, ExceptionGroupType, run_verify

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INVALID = 2
EXIT_SIZE_GUARD = 3
EXIT_IO = 4

FIDELITY_HEADER = ("kind", "depth", "N", "p", "f_avg", "epsilon", "method")
CENSUS_HEADER = ("kind", "depth", "r", "count", "method")
THRESHOLD_HEADER = ("kind", "depth", "N", "p_star")
MELINKS_HEADER = ("kind", "depth", "p", "m", "f_avg", "strategy", "chosen_edges")
ASYMPTOTIC_HEADER = ("kind", "p", "depth", "N", "epsilon")
TABLE_HEADER = ("kind", "N", "depth", "closed_form", "sample_mean", "gap", "trials", "seeds")


def _fault(text: str) -> Tuple[TreeKind, int, int]:
    parts = [t.strip() for t in text.split(",")]
    if len(parts) != 3:
        raise InvalidParameterError(f"expected KIND,D,R, got {text!r}")
    return TreeKind.parse(parts[0]), int(parts[1]), int(parts[2])


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="key = value file; flags override its values")
    parser.add_argument("--format", choices=FORMATS, default=None, help="output format (default: csv)")
    parser.add_argument("--out", metavar="PATH", default=None, help="write output here instead of stdout")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    parser.add_argument("--log", metavar="FILE", default=None, help="also write logs to FILE")


def _kind(parser: argparse.ArgumentParser, help_text: str = "tree kind") -> None:
    parser.add_argument("--kind", type=TreeKind.parse, default=None, help=f"{help_text}: dabt, dsbt, uabt or usbt")


def _size(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--depth", type=int, default=None, help="tree depth d >= 1")
    group.add_argument("--nodes", type=parse_int_list, default=None, help="node count N (comma list where allowed)")


def _p(parser: argparse.ArgumentParser, help_text: str = "Werner parameter(s), comma separated") -> None:
    parser.add_argument("--p", type=parse_float_list, default=None, help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtree",
        description="Average teleportation fidelity of binary-tree quantum repeater networks",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("fidelity", help="average fidelity of a uniform-p tree")
    _kind(p)
    _size(p)
    _p(p)
    p.add_argument(
        "--method",
        choices=[m.value for m in FidelityMethod],
        default=FidelityMethod.CLOSED_FORM.value,
        help="closed_form (default), census_weighted or pairwise_enumeration",
    )
    _common(p)

    p = sub.add_parser("census", help="path counts by length")
    _kind(p)
    _size(p)
    p.add_argument(
        "--method",
        choices=[m.value for m in CensusMethod],
        default=CensusMethod.CLOSED_FORM.value,
        help="closed_form (default) or enumeration",
    )
    _common(p)

    p = sub.add_parser("threshold", help="Werner parameter where the average fidelity reaches the target")
    _kind(p, "tree kind (default: all kinds)")
    _size(p)
    p.add_argument("--target", type=float, default=None, help="target fidelity (default 2/3)")
    _common(p)

    p = sub.add_parser("melinks", help="best placement of maximally entangled links")
    _kind(p)
    _size(p)
    _p(p, "Werner parameter of the remaining links")
    p.add_argument("--m", type=int, default=None, help="number of perfect links (default: every m)")
    p.add_argument(
        "--strategy",
        choices=[s.value for s in PlacementStrategy],
        default=None,
        help="exhaustive (default up to 14 edges) or greedy",
    )
    p.add_argument("--threshold", action="store_true", help="emit only the smallest m reaching the target")
    p.add_argument("--target", type=float, default=None, help="target fidelity for --threshold (default 2/3)")
    _common(p)

    p = sub.add_parser("montecarlo", help="random U(0,1) edge weights, repeated trials")
    _kind(p)
    _size(p)
    p.add_argument("--trials", type=int, default=None, help="number of trials (default 100)")
    p.add_argument("--seed", type=int, default=None, help="64-bit seed (default 42)")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $QTREE_WORKERS or 1)")
    p.add_argument("--per-trial-csv", metavar="PATH", default=None, help="also write trial,f_avg rows here")
    p.add_argument("--weights-csv", metavar="PATH", default=None, help="also write every trial's edge weights here")
    p.add_argument("--table", action="store_true", help="closed form vs seed-averaged sample mean table")
    p.add_argument("--kinds", type=parse_kinds, default=None, help="kinds for --table (default: all)")
    p.add_argument("--seeds", type=int, default=20, help="seeds 0..S-1 averaged by --table (default 20)")
    p.add_argument("--reference-draws", action="store_true", help="first draws of trial 0's stream for --seed")
    _common(p)

    p = sub.add_parser("asymptotic", help="epsilon against N with a fitted decay order")
    _kind(p)
    _p(p, "Werner parameter")
    p.add_argument("--depths", type=parse_int_list, default=None, help="ascending depths, e.g. 1..30")
    _common(p)

    p = sub.add_parser("sweep", help="cross-product of kinds, sizes and p")
    p.add_argument("--kinds", type=parse_kinds, default=None, help="comma list of kinds or 'all' (default: all)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--depths", type=parse_int_list, default=None, help="depths, comma list or lo..hi")
    group.add_argument("--nodes", type=parse_int_list, default=None, help="node counts, comma list")
    _p(p, "explicit p values, comma separated")
    p.add_argument("--p-start", type=float, default=None, help="first grid point (default 0)")
    p.add_argument("--p-stop", type=float, default=None, help="last grid point (default 1)")
    p.add_argument("--p-steps", type=int, default=None, help="number of grid points")
    p.add_argument("--analysis", choices=ANALYSES, default=None, help="fidelity (default), threshold or asymptotic")
    p.add_argument("--target", type=float, default=None, help="threshold target (default 2/3)")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $QTREE_WORKERS or 1)")
    _common(p)

    p = sub.add_parser("verify", help="cross-check every module")
    p.add_argument("--level", choices=LEVELS, default="quick", help="quick (default) or full")
    p.add_argument(
        "--inject-census-fault",
        type=_fault,
        default=None,
        metavar="KIND,D,R",
        help="test mode: add one to a closed-form census cell",
    )
    _common(p)

    p = sub.add_parser("tree", help="dump a tree as an edge list")
    _kind(p)
    _size(p)
    _common(p)
    return parser


def _require_kind(args) -> TreeKind:
    if args.kind is None:
        raise InvalidParameterError("--kind is required")
    return args.kind


def _depth(args, kind: TreeKind) -> int:
    if args.depth is not None:
        return args.depth
    if args.nodes:
        if len(args.nodes) != 1:
            raise InvalidParameterError(f"{args.command} takes a single node count, got {list(args.nodes)}")
        return depth_from_nodes(kind, args.nodes[0])
    raise InvalidParameterError("one of --depth or --nodes is required")


def _single_p(args) -> float:
    if not args.p or len(args.p) != 1:
        raise InvalidParameterError(f"{args.command} takes exactly one --p value")
    return args.p[0]


def _fidelity_row(report) -> tuple:
    return (report.kind, report.depth, report.n_nodes, report.p, report.f_avg, report.epsilon, report.method)


def cmd_fidelity(args) -> int:
    kind = _require_kind(args)
    if not args.p:
        raise InvalidParameterError("--p is required")
    depth = _depth(args, kind)
    rows = []
    for p in args.p:
        if args.method == FidelityMethod.CENSUS_WEIGHTED.value:
            report = favg_from_census(census_closed_form(kind, depth), p)
        elif args.method == FidelityMethod.PAIRWISE_ENUMERATION.value:
            report = dataclasses.replace(favg_weighted(uniform_network(kind, depth, p)), p=p)
        elif args.nodes:
            report = favg_closed_nodes(kind, args.nodes[0], p)
        else:
            report = favg_closed(kind, depth, p)
        rows.append(_fidelity_row(report))
    write_rows(FIDELITY_HEADER, rows, args.format or "csv", args.out)
    return EXIT_OK


def cmd_census(args) -> int:
    kind = _require_kind(args)
    depth = _depth(args, kind)
    if args.method == CensusMethod.ENUMERATION.value:
        census = census_enumerate(build_tree(kind, depth))
    else:
        census = census_closed_form(kind, depth)
    write_rows(CENSUS_HEADER, census.rows(), args.format or "csv", args.out)
    return EXIT_OK


def cmd_threshold(args) -> int:
    kinds = (args.kind,) if args.kind else tuple(TreeKind)
    target = C.CLASSICAL_LIMIT if args.target is None else args.target
    if args.nodes:
        results = threshold_table(kinds, args.nodes, target)
    elif args.depth is not None:
        results = [advantage_threshold(kind, args.depth, target) for kind in kinds]
    else:
        raise InvalidParameterError("one of --depth or --nodes is required")
    rows = [(r.kind, r.depth, r.n_nodes, r.p_star) for r in results]
    write_rows(THRESHOLD_HEADER, rows, args.format or "csv", args.out)
    return EXIT_OK


def _placement_row(placement, p: float) -> tuple:
    return (
        placement.kind,
        placement.depth,
        p,
        placement.m,
        placement.f_avg,
        placement.strategy,
        placement.chosen_edges,
    )


def cmd_melinks(args) -> int:
    kind = _require_kind(args)
    depth = _depth(args, kind)
    p = _single_p(args)
    if args.threshold:
        target = C.CLASSICAL_LIMIT if args.target is None else args.target
        m = me_threshold(kind, depth, p, args.strategy, target)
        placements = [me_placement(kind, depth, p, m, args.strategy)]
    elif args.m is not None:
        placements = [me_placement(kind, depth, p, args.m, args.strategy)]
    else:
        placements = me_curve(kind, depth, p, args.strategy)
    write_rows(MELINKS_HEADER, [_placement_row(pl, p) for pl in placements], args.format or "csv", args.out)
    return EXIT_OK


def _montecarlo_table(args) -> int:
    kinds = args.kinds or tuple(TreeKind)
    nodes = args.nodes or (15, 127)
    rows = table_comparison(kinds, nodes, args.trials or 100, tuple(range(args.seeds)), args.threads)
    out = [
        (r.kind, r.n_nodes, r.depth, r.closed_form, r.sample_mean, r.gap, r.trials, len(r.seeds))
        for r in rows
    ]
    write_rows(TABLE_HEADER, out, args.format or "csv", args.out)
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    seed = 42 if args.seed is None else args.seed
    if args.reference_draws:
        draws = reference_draws(seed)
        write_rows(("index", "draw"), list(enumerate(draws)), args.format or "csv", args.out)
        return EXIT_OK
    if args.table:
        return _montecarlo_table(args)
    kind = _require_kind(args)
    depth = _depth(args, kind)
    trials = 100 if args.trials is None else args.trials
    batch = run_trials(kind, depth, trials, seed, args.threads)
    predicted, note = expectation_check(kind, depth)
    payload = {
        "kind": batch.kind,
        "depth": batch.depth,
        "N": batch.n_nodes,
        "trials": batch.trials,
        "seed": batch.seed,
        "mean": batch.mean,
        "std_error": batch.std_error,
        "predicted_p_half": predicted,
        "gap": batch.mean - predicted,
        "note": note,
        "per_trial": list(batch.per_trial_f),
    }
    fmt = args.format or "json"
    with open_output(args.out) as stream:
        if fmt == "json":
            write_json(stream, payload)
        else:
            summary = [(k, v) for k, v in payload.items() if k not in ("per_trial", "note")]
            (write_table if fmt == "table" else write_csv)(stream, ("field", "value"), summary)
    if args.per_trial_csv:
        with open_output(args.per_trial_csv) as stream:
            write_csv(stream, ("trial", "f_avg"), enumerate(batch.per_trial_f))
    if args.weights_csv:
        tree = build_tree(kind, depth)
        with open_output(args.weights_csv) as stream:
            rows = (
                (t, f"{u}-{v}", w)
                for t in range(trials)
                for (u, v), w in zip(tree.edges, trial_weights(tree, seed, t))
            )
            write_csv(stream, ("trial", "edge", "p"), rows)
    return EXIT_OK


def cmd_asymptotic(args) -> int:
    kind = _require_kind(args)
    p = _single_p(args)
    if not args.depths:
        raise InvalidParameterError("--depths is required")
    profile = asymptotic_profile(kind, p, args.depths)
    logger.info("%s p=%r: order %s, fitted slope %s", kind, p, profile.fitted_order, profile.slope)
    fmt = args.format or "csv"
    rows = [(kind, p, d, n, eps) for d, (n, eps) in zip(profile.depths, profile.samples)]
    if fmt == "json":
        payload = {
            "kind": kind,
            "p": p,
            "fitted_order": profile.fitted_order,
            "slope": profile.slope,
            "decreasing_from": profile.decreasing_from(),
            "samples": [dict(zip(ASYMPTOTIC_HEADER, row)) for row in rows],
        }
        with open_output(args.out) as stream:
            write_json(stream, payload)
    else:
        write_rows(ASYMPTOTIC_HEADER, rows, fmt, args.out)
    return EXIT_OK


def _sweep_rows(config: SweepConfig, kind: TreeKind, depth: int) -> List[tuple]:
    n = node_count(kind, depth)
    if config.analysis == "threshold":
        return [(kind, depth, n, advantage_threshold(kind, depth, config.target).p_star)]
    rows = []
    for p in config.p_values:
        report = favg_closed(kind, depth, p)
        if config.analysis == "fidelity":
            rows.append(_fidelity_row(report))
        else:
            rows.append((kind, p, depth, n, report.epsilon))
    return rows


def cmd_sweep(args) -> int:
    config = SweepConfig.from_namespace(args)
    items = [(kind, depth) for kind in config.ordered_kinds() for depth in config.depths_for(kind)]
    workers = resolve_workers(args.threads)
    logger.info("sweep: %d (kind, depth) items, %d p values, %d worker(s)", len(items), len(config.p_values), workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda item: _sweep_rows(config, *item), items))
    else:
        chunks = [_sweep_rows(config, *item) for item in items]
    header = {
        "fidelity": FIDELITY_HEADER,
        "threshold": THRESHOLD_HEADER,
        "asymptotic": ASYMPTOTIC_HEADER,
    }[config.analysis]
    count = write_rows(header, [row for chunk in chunks for row in chunk], config.format, config.out)
    logger.info("sweep: %d rows", count)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_verify(args.level, args.inject_census_fault)
    with open_output(args.out) as stream:
        if (args.format or "table") == "csv":
            write_csv(stream, ("check", "cases", "failed", "status", "seconds"), report.rows())
        else:
            write_table(stream, ("check", "cases", "failed", "status", "seconds"), report.rows())
    try:
        report.raise_for_failures()
    except ExceptionGroupType as group:
        for error in group.exceptions:
            print(f"FAIL {error}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_tree(args) -> int:
    kind = _require_kind(args)
    tree = build_tree(kind, _depth(args, kind))
    tree.validate()
    with open_output(args.out) as stream:
        stream.write(tree.edge_list_text())
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "fidelity": cmd_fidelity,
    "census": cmd_census,
    "threshold": cmd_threshold,
    "melinks": cmd_melinks,
    "montecarlo": cmd_montecarlo,
    "asymptotic": cmd_asymptotic,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "tree": cmd_tree,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        configure_logging(args.verbose, args.log)
        if args.config:
            apply_config(args, read_config(args.config))
        return COMMANDS[args.command](args)
    except InvalidParameterError as exc:
        print(f"qtree {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SizeGuardError as exc:
        print(f"qtree {args.command}: {exc}", file=sys.stderr)
        return EXIT_SIZE_GUARD
    except OSError as exc:
        print(f"qtree {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
