"""Command-line surface: simulate orbits, export phase spaces, count fixed
points, and run the verification suites.

Exit codes: 0 success, 1 usage error, 2 state-space cap exceeded,
3 verification or cross-check failure. All output is a pure function of the
arguments; reruns emit identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import fixedpoints, graphs, phasespace
from .dynamics import (
    ExtendedState,
    OrbitCapExceeded,
    Parallel,
    Rule,
    RuleScheme,
    Scheme,
    Sequential,
    format_state,
    orbit,
    parse_state,
    potential,
    step_function,
)
from .graphs import Graph

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAP = 2
EXIT_VERIFY = 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Parsed invocation: graph source, rule, scheme, output options."""

    graph_spec: str
    graph: Graph
    rule: Rule | None
    scheme: Scheme | None
    output_format: str
    cap: int | None
    workers: int


def build_graph(spec: str) -> Graph:
    """Builtin specs: path:n, cycle:n, star:n (n leaves), random-tree:n:seed,
    file:PATH (edge-list text or JSON)."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "path":
            return graphs.path_graph(int(rest))
        if kind == "cycle":
            return graphs.cycle_graph(int(rest))
        if kind == "star":
            return graphs.star_graph(int(rest))
        if kind == "random-tree":
            n_text, _, seed_text = rest.partition(":")
            if not seed_text:
                raise UsageError("random-tree spec is random-tree:<n>:<seed>")
            return graphs.random_tree(int(n_text), int(seed_text))
        if kind == "file":
            return graphs.load_graph(rest)
    except UsageError:
        raise
    except (ValueError, OSError) as exc:
        raise UsageError(f"bad graph spec {spec!r}: {exc}") from exc
    raise UsageError(f"unknown graph spec {spec!r}")


def parse_scheme(text: str, n: int) -> Scheme:
    if text == "parallel":
        return Parallel()
    if text.startswith("seq:"):
        body = text[len("seq:") :]
        if body == "lex":
            return Sequential(tuple(range(n)))
        try:
            order = tuple(int(part) for part in body.split(","))
        except ValueError as exc:
            raise UsageError(f"bad sequential order {body!r}") from exc
        if sorted(order) != list(range(n)):
            raise UsageError(f"{order} is not a permutation of the {n} vertices")
        return Sequential(order)
    raise UsageError(f"unknown scheme {text!r} (use 'parallel', 'seq:lex' or 'seq:0,1,...')")


def parse_rule(text: str) -> Rule:
    try:
        return Rule(text)
    except ValueError as exc:
        raise UsageError(f"unknown rule {text!r}") from exc


# --- simulate -----------------------------------------------------------------


def cmd_simulate(args) -> int:
    g = build_graph(args.graph)
    rule = parse_rule(args.rule)
    scheme = parse_scheme(args.scheme, g.n)
    try:
        start = parse_state(args.state)
        start.validate_for(g)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    step = step_function(g, RuleScheme(rule, scheme))
    cap = args.max_steps if args.max_steps else phasespace.state_space_size(g) + 1
    try:
        prefix, cycle = orbit(start, step, cap)
    except OrbitCapExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CAP

    show_potential = rule is Rule.MIXED

    def annotate(s: ExtendedState) -> str:
        if show_potential:
            return f"{format_state(s)} potential={potential(s, g)}"
        return format_state(s)

    if args.format == "json":
        payload = {
            "transient": [format_state(s) for s in prefix],
            "cycle": [format_state(s) for s in cycle],
            "cycle_length": len(cycle),
            "transient_length": len(prefix),
            "steps": len(prefix) + len(cycle),
        }
        if show_potential:
            payload["potentials"] = [potential(s, g) for s in prefix + cycle]
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
        return EXIT_OK

    for t, s in enumerate(prefix):
        print(f"t={t} {annotate(s)}")
    print(f"cycle (length {len(cycle)}):")
    for t, s in enumerate(cycle):
        print(f"t={len(prefix) + t} {annotate(s)}")
    print(f"transient length {len(prefix)}, cycle length {len(cycle)}, steps {len(prefix) + len(cycle)}")
    return EXIT_OK


# --- phase-space ---------------------------------------------------------------


def cmd_phase_space(args) -> int:
    g = build_graph(args.graph)
    rule = parse_rule(args.rule)
    scheme = parse_scheme(args.scheme, g.n)
    try:
        ps = phasespace.build_phase_space(
            g, RuleScheme(rule, scheme), cap=args.cap, workers=args.workers
        )
    except phasespace.StateSpaceCapExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CAP
    if args.format == "dot":
        sys.stdout.write(phasespace.to_dot(ps))
        return EXIT_OK
    if args.format == "json":
        sys.stdout.write(phasespace.to_json(ps))
        return EXIT_OK
    summary = phasespace.attractors(ps)
    print(f"states {ps.size}")
    print(f"fixed points {summary.fixed_point_count}")
    hist = ",".join(f"{k}:{v}" for k, v in sorted(summary.cycle_length_histogram.items()))
    print(f"cycle lengths {hist}")
    print(f"transient states {summary.transient_state_count}")
    print(f"periodic states {summary.periodic_state_count}")
    return EXIT_OK


# --- count-fix -----------------------------------------------------------------

COUNT_METHODS = ("brute", "backtrack", "path", "cycle", "cycle-recursion", "transfer", "tree")


def _count_with(method: str, g: Graph, cap: int | None) -> int:
    if method == "brute":
        return fixedpoints.count_fixed_brute(g, cap=cap)
    if method == "backtrack":
        return fixedpoints.count_fixed_backtrack(g)
    if method == "path":
        if not graphs.is_path(g):
            raise UsageError("method 'path' requires a path graph")
        return fixedpoints.count_fixed_path(g.n)
    if method == "cycle":
        if not graphs.is_cycle(g):
            raise UsageError("method 'cycle' requires a cycle graph")
        return fixedpoints.count_fixed_cycle(g.n)
    if method == "cycle-recursion":
        if not graphs.is_cycle(g):
            raise UsageError("method 'cycle-recursion' requires a cycle graph")
        return fixedpoints.count_fixed_cycle_recursion(g.n)
    if method == "transfer":
        if not graphs.is_cycle(g):
            raise UsageError("method 'transfer' requires a cycle graph")
        return fixedpoints.count_fixed_cycle_transfer(g.n)
    if method == "tree":
        if not graphs.is_tree(g):
            raise UsageError("method 'tree' requires a tree")
        return fixedpoints.count_fixed_tree(g)
    raise UsageError(f"unknown method {method!r}")


def cmd_count_fix(args) -> int:
    g = build_graph(args.graph)
    try:
        count = _count_with(args.method, g, args.cap)
    except phasespace.StateSpaceCapExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CAP
    if args.check:
        other = _count_with(args.check, g, args.cap)
        if other != count:
            print(
                f"cross-check failed: {args.method}={count} but {args.check}={other}",
                file=sys.stderr,
            )
            return EXIT_VERIFY
    print(count)
    return EXIT_OK


# --- verify ---------------------------------------------------------------------

VERIFY_SUITES = ("limits", "conjugacy", "potential", "fixsets", "half-ones", "unidirectional", "all")


def _graph_pool(args) -> list[tuple[str, Graph]]:
    if args.graph:
        return [(args.graph, build_graph(args.graph))]
    pool = []
    for n in range(1, args.max_n + 1):
        for i, g in enumerate(graphs.enumerate_connected_graphs(n)):
            pool.append((f"n{n}#{i}", g))
    return pool


def _run_suite(suite: str, pool) -> list[tuple[str, phasespace.CheckReport]]:
    results = []
    for label, g in pool:
        if suite == "limits":
            for rule in Rule:
                for family in ("sequential", "parallel"):
                    results.append((label, phasespace.verify_limit_theorem(g, rule, family)))
        elif suite == "conjugacy":
            results.append((label, phasespace.verify_conjugacy(g)))
        elif suite == "potential":
            results.append((label, phasespace.verify_potential_descent(g)))
        elif suite == "fixsets":
            results.append((label, fixedpoints.verify_fixed_point_sets(g)))
        elif suite == "half-ones":
            rep = fixedpoints.verify_half_ones(g)
            results.append(
                (label, phasespace.CheckReport("half-ones", rep.passed, rep.details))
            )
        elif suite == "unidirectional":
            results.append((label, phasespace.verify_unidirectional(g)))
    return results


def cmd_verify(args) -> int:
    pool = _graph_pool(args)
    suites = [s for s in VERIFY_SUITES if s != "all"] if args.suite == "all" else [args.suite]
    results = []
    for suite in suites:
        results.extend(_run_suite(suite, pool))
    failed = [r for r in results if not r[1].passed]
    if args.format == "json":
        payload = {
            "passed": not failed,
            "checks": [
                {
                    "graph": label,
                    "name": rep.name,
                    "passed": rep.passed,
                    "details": rep.details,
                    "counterexample": rep.counterexample,
                }
                for label, rep in results
            ],
        }
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        for label, rep in results:
            mark = "PASS" if rep.passed else "FAIL"
            line = f"{mark} {rep.name} graph={label}: {rep.details}"
            if not rep.passed and rep.counterexample:
                line += f" counterexample={rep.counterexample}"
            print(line)
        print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


# --- argument plumbing ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse's own failures to exit code 1
        raise UsageError(message)


def make_parser() -> _Parser:
    parser = _Parser(prog="etgds", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="walk one orbit until it closes")
    sim.add_argument("--graph", required=True)
    sim.add_argument("--rule", required=True)
    sim.add_argument("--scheme", required=True)
    sim.add_argument("--state", required=True, help='state literal "((x1,k1),(x2,k2),...)"')
    sim.add_argument("--format", choices=("text", "json"), default="text")
    sim.add_argument("--max-steps", type=int, default=None)
    sim.set_defaults(func=cmd_simulate)

    ps = sub.add_parser("phase-space", help="build and export the full phase space")
    ps.add_argument("--graph", required=True)
    ps.add_argument("--rule", required=True)
    ps.add_argument("--scheme", required=True)
    ps.add_argument("--format", choices=("text", "json", "dot"), default="text")
    ps.add_argument("--cap", type=int, default=None, help="state-space cap (also env ETGDS_CAP)")
    ps.add_argument("--workers", type=int, default=1)
    ps.set_defaults(func=cmd_phase_space)

    cf = sub.add_parser("count-fix", help="count fixed points exactly")
    cf.add_argument("--graph", required=True)
    cf.add_argument("--method", required=True, choices=COUNT_METHODS)
    cf.add_argument("--check", choices=COUNT_METHODS, default=None,
                    help="also run a second method and require equal counts")
    cf.add_argument("--cap", type=int, default=None)
    cf.set_defaults(func=cmd_count_fix)

    ver = sub.add_parser("verify", help="run verification sweeps on small graphs")
    ver.add_argument("suite", choices=VERIFY_SUITES)
    ver.add_argument("--graph", default=None, help="restrict to one graph spec")
    ver.add_argument("--max-n", type=int, default=3,
                     help="sweep all connected graphs up to this many vertices (default 3)")
    ver.add_argument("--format", choices=("text", "json"), default="text")
    ver.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
