"""Command-line interface.

Subcommands: ``run``, ``bench``, ``gen``, ``verify`` and ``concentration``.
Exit status is 0 on success, 1 when a check fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time

from .edcs import check_edcs, format_dump, parse_dump
from .experiment import ExperimentConfig, concentration_trials, run_experiment, strip_timing
from .generators import KINDS, BadSpec, GeneratorSpec, generate_graph
from .graph import (
    Graph, Matching, as_given, ordered_edges, parse_edge_list, permute, read_graph,
    serialize_edge_list, subgraph_union,
)
from .matching import max_matching, verify_matching
from .stream import BadEpsilon, SpaceBudgetExceeded, derive_params, run

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _add_graph_source(p: argparse.ArgumentParser, required_kind: bool = False) -> None:
    g = p.add_argument_group("graph source")
    g.add_argument("--input", help="edge-list file")
    g.add_argument("--kind", choices=KINDS, required=required_kind, help="generator kind")
    g.add_argument("--n", type=int, help="vertex count for the generator")
    g.add_argument("--avg-degree", type=float)
    g.add_argument("--extra-edges", type=int)
    g.add_argument("--p", type=float, help="edge probability (erdos-renyi)")
    g.add_argument("--graph-seed", type=int, default=0)
    g.add_argument("--strict", action="store_true", help="reject duplicate edges in --input")


def _add_params(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("algorithm parameters")
    g.add_argument("--epsilon", type=float, default=0.1)
    g.add_argument("--beta", type=int)
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--alpha", type=int)
    g.add_argument("--gamma", type=int)
    g.add_argument("--fallback-cap", type=int, help="max m for store-everything mode")
    g.add_argument("--x-cap", type=int, help="hard cap on |X| (default 4*gamma)")
    g.add_argument("--x-policy", choices=("fail", "grow"))
    g.add_argument("--matcher", choices=("auto", "bipartite", "blossom"), default="auto")
    g.add_argument("--audit", action="store_true", help="check invariants after every move")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock fields")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rosmatch",
        description="Approximate maximum matching over random-order edge streams.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one algorithm execution")
    _add_graph_source(p)
    _add_params(p)
    p.add_argument("--order", choices=("random", "as-given"), default="random")
    p.add_argument("--seed", type=int, default=0, help="stream order seed")
    p.add_argument("--dump-edcs", help="write the final H in dump format")
    p.add_argument("--no-edges", action="store_true", help="omit matching edges from JSON")
    _add_output(p)

    p = sub.add_parser("bench", help="seeded multi-trial experiment")
    _add_graph_source(p)
    _add_params(p)
    p.add_argument("--order", choices=("random", "as-given"), default="random")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="base seed for stream orders")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-verify", action="store_true", help="skip offline structural checks")
    p.add_argument("--min-ratio", type=float, help="exit 1 if any trial ratio falls below this")
    _add_output(p)

    p = sub.add_parser("gen", help="write a generated graph as an edge list")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--avg-degree", type=float)
    p.add_argument("--extra-edges", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="check an H dump (and optionally a matching) offline")
    p.add_argument("--dump", required=True, help="file written by run --dump-edcs")
    p.add_argument("--input", help="graph edge list; enables the subgraph and P2 checks")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--matching", help="edge list of a matching to check against --input")
    p.add_argument("--require-edcs", action="store_true", help="also fail on P2 violations")

    p = sub.add_parser("concentration", help="late-stream matching concentration check")
    _add_graph_source(p)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-pass", type=float, default=1.0)
    _add_output(p)
    return parser


def _generator_spec(args, seed_attr: str = "graph_seed") -> GeneratorSpec:
    if args.n is None:
        raise UsageError("--n is required with --kind")
    return GeneratorSpec(
        kind=args.kind, n=args.n, avg_degree=args.avg_degree,
        extra_edges=args.extra_edges, p=args.p, seed=getattr(args, seed_attr),
    )


def _load_graph(args) -> tuple[Graph, GeneratorSpec | None]:
    if args.input and args.kind:
        raise UsageError("give either --input or --kind, not both")
    if args.input:
        return read_graph(args.input, strict=args.strict), None
    if args.kind:
        spec = _generator_spec(args)
        return generate_graph(spec), spec
    raise UsageError("a graph source is required: --input FILE or --kind KIND")


def _overrides(args) -> dict:
    ov = {"lam": args.lam, "beta": args.beta, "alpha": args.alpha, "gamma": args.gamma}
    return {k: v for k, v in ov.items() if v is not None}


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _one_row_csv(row: dict) -> str:
    flat = {k: v for k, v in row.items() if not isinstance(v, (dict, list))}
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
    writer.writeheader()
    writer.writerow(flat)
    return buf.getvalue()


def cmd_run(args) -> int:
    g, spec = _load_graph(args)
    params = derive_params(
        args.epsilon, max(g.n, 1), g.m, **_overrides(args),
        fallback_threshold=args.fallback_cap, x_cap=args.x_cap,
        x_policy=args.x_policy or "fail",
    )
    order = permute(g.m, args.seed) if args.order == "random" else as_given(g.m)
    edges = ordered_edges(g, order)
    start = time.perf_counter()
    try:
        result = run(g.n, g.m, edges, params, args.matcher, audit=args.audit)
    except SpaceBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    elapsed = time.perf_counter() - start

    report = result.as_dict(include_edges=not args.no_edges)
    report = {
        "graph": {"n": g.n, "m": g.m, "source": args.input or spec.as_dict()},
        "order": args.order,
        "seed": args.seed,
        **report,
        "wall_time_s": elapsed,
    }
    if args.no_timing:
        report = strip_timing(report)
    if args.dump_edcs:
        with open(args.dump_edcs, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_dump(result.h_edges, g.n, params.beta, result.moves))
    text = json.dumps(report, indent=2) + "\n" if args.format == "json" else _one_row_csv(report)
    _emit(text, args.out)
    ok = verify_matching(subgraph_union(result.h_edges, result.x_edges, g.n), result.matching)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_bench(args) -> int:
    g, spec = _load_graph(args)
    cfg = ExperimentConfig(
        generator=spec,
        epsilon=args.epsilon,
        overrides=_overrides(args),
        trials=args.trials,
        seed=args.seed,
        matcher=args.matcher,
        order=args.order,
        audit=args.audit,
        verify=not args.no_verify,
        fallback_threshold=args.fallback_cap,
        x_cap=args.x_cap,
        x_policy=args.x_policy or "grow",
        workers=args.workers,
    )
    report = run_experiment(cfg, graph=g)
    if args.input:
        report.config["input"] = args.input
    timing = not args.no_timing
    text = report.to_json(timing) if args.format == "json" else report.to_csv(timing)
    _emit(text, args.out)
    if not report.checks_passed:
        return EXIT_CHECK
    if args.min_ratio is not None and report.aggregate.get("ratio_min", 0) < args.min_ratio:
        return EXIT_CHECK
    return EXIT_OK


def cmd_gen(args) -> int:
    g = generate_graph(_generator_spec(args, "seed"))
    _emit(serialize_edge_list(g), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    with open(args.dump, encoding="utf-8") as fh:
        h_edges, recorded, moves, phi2x = parse_dump(fh.read())
    g = read_graph(args.input) if args.input else None
    report = check_edcs(h_edges, g, args.beta, args.lam)

    deg: dict[int, int] = {}
    for u, v in h_edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    degree_mismatch = sorted(x for x in recorded if recorded[x] != deg.get(x, 0))
    phi2 = sum(deg[u] + deg[v] for u, v in h_edges)
    expected_phi2x = (2 * args.beta - 1) * sum(deg.values()) - 2 * phi2

    out = {
        "h_size": len(h_edges),
        "moves": moves,
        "p1_violations": [list(e) for e in report.p1],
        "p2_violations": len(report.p2) if g is not None else None,
        "degree_mismatches": degree_mismatch,
        "phi2x_recorded": phi2x,
        "phi2x_recomputed": expected_phi2x,
    }
    ok = not report.p1 and not degree_mismatch and phi2x == expected_phi2x
    if args.require_edcs:
        if g is None:
            raise UsageError("--require-edcs needs --input")
        ok = ok and not report.p2
    if args.matching:
        if g is None:
            raise UsageError("--matching needs --input")
        with open(args.matching, encoding="utf-8") as fh:
            mg = parse_edge_list(fh, header=None)
        m_ok = verify_matching(g, Matching(mg.edges))
        out["matching_size"] = mg.m
        out["matching_valid"] = m_ok
        out["mu_exact"] = max_matching(g).size
        ok = ok and m_ok
    out["ok"] = ok
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_concentration(args) -> int:
    g, _ = _load_graph(args)
    if not 0 <= args.epsilon < 0.5:
        raise BadEpsilon("epsilon must be < 1/2")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    records = concentration_trials(g, args.epsilon, args.trials, args.seed)
    fraction = sum(r["passed"] for r in records) / len(records)
    if args.format == "json":
        text = json.dumps({"pass_fraction": fraction, "trials": records}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK if fraction >= args.min_pass else EXIT_CHECK


COMMANDS = {
    "run": cmd_run,
    "bench": cmd_bench,
    "gen": cmd_gen,
    "verify": cmd_verify,
    "concentration": cmd_concentration,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (UsageError, BadEpsilon, BadSpec, ValueError) as exc:
        # GraphError, NotBipartite and bad parameters all derive from ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
