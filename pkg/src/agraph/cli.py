"""``agraph`` command-line interface.

Exit codes: 0 success, 1 validation or domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from pathlib import Path
from typing import Sequence

from agraph.agf import parse_agf
from agraph.catalog import SURFACES, default_catalog_path, load_catalog, lookup
from agraph.errors import AgfSyntaxError, AgraphError
from agraph.graph import AttackGraph, lint
from agraph.mitigation import MitigationAction, recommend, what_if
from agraph.render import export_dot, render_table
from agraph.scenarios import (
    enumerate_scenarios,
    goal_percentage,
    minimal_cut_sets,
    node_frequency,
)


class _UsageError(Exception):
    pass


class _Out:
    def __init__(self, quiet: bool, color: bool) -> None:
        self.quiet = quiet
        self.color = color

    def info(self, text: str) -> None:
        if not self.quiet:
            print(text, file=sys.stderr)

    def error(self, text: str) -> None:
        if self.color:
            text = f"\033[31m{text}\033[0m"
        print(text, file=sys.stderr)


def _load(path: str, out: _Out) -> AttackGraph:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        graph = parse_agf(Path(path).read_text(encoding="utf-8"))
    for w in caught:
        out.info(f"{path}: warning: {w.message}")
    return graph


def _pick_scope(graph: AttackGraph, scope: str | None) -> str:
    if scope is not None:
        return scope
    if len(graph.scope_names) == 1:
        return graph.scope_names[0]
    raise _UsageError(f"--scope is required; choose from {', '.join(graph.scope_names)}")


def cmd_validate(args, out: _Out) -> int:
    graph = _load(args.file, out)
    for w in lint(graph):
        out.info(f"{args.file}: warning: {w}")
    if not out.quiet:
        print(f"{args.file}: ok ({len(graph.steps)} steps, scopes: {', '.join(graph.scope_names)})")
    return 0


def cmd_scenarios(args, out: _Out) -> int:
    graph = _load(args.file, out)
    table = enumerate_scenarios(graph, _pick_scope(graph, args.scope))
    sys.stdout.write(render_table(table, args.format, args.goal_display))
    return 0


def cmd_critical(args, out: _Out) -> int:
    graph = _load(args.file, out)
    scopes = args.scope or list(graph.scope_names)
    ranked = node_frequency(enumerate_scenarios(graph, s) for s in scopes)
    print("rank\tnode\tlabel\tappearances\tweighted\tscopes")
    for i, f in enumerate(ranked, start=1):
        print(f"{i}\t{f.node}\t{graph.node(f.node).label}\t{f.appearances}\t{f.weighted}\t{','.join(f.scopes)}")
    return 0


def cmd_cuts(args, out: _Out) -> int:
    graph = _load(args.file, out)
    for cut in minimal_cut_sets(graph, _pick_scope(graph, args.scope), args.max_size):
        print("{" + ", ".join(cut.sorted()) + "}")
    return 0


def _parse_reduce(text: str) -> MitigationAction:
    node, sep, weight = text.partition("=")
    if not sep or not node:
        raise AgraphError(f"--reduce expects <id>=<weight>, got {text!r}", code="InvalidWeight")
    try:
        w = int(weight)
    except ValueError:
        raise AgraphError(f"weight {weight!r} is not an integer", code="InvalidWeight") from None
    return MitigationAction.reduce_weight(node, w)


def cmd_whatif(args, out: _Out) -> int:
    graph = _load(args.file, out)
    scope = _pick_scope(graph, args.scope)
    action = MitigationAction.neutralize(args.neutralize) if args.neutralize else _parse_reduce(args.reduce)
    result = what_if(graph, scope, action)
    print(f"action: {action}")
    print(f"scope: {scope}")
    print(f"rows: {len(result.before)} -> {len(result.after)} ({result.rows_eliminated} eliminated)")
    print(f"max score: {goal_percentage(result.before.max_score)} -> {goal_percentage(result.after.max_score)}"
          f" (delta {result.max_score_delta})")
    print(f"mean per-row delta: {result.mean_score_delta}")
    print()
    sys.stdout.write(render_table(result.after, args.format, args.goal_display))
    return 0


def cmd_recommend(args, out: _Out) -> int:
    graph = _load(args.file, out)
    catalog = load_catalog(default_catalog_path())
    recs = recommend(graph, args.scope or None, catalog, args.k)
    for i, r in enumerate(recs, start=1):
        print(f"{i}. {r.action}: {r.rows_eliminated} rows eliminated, max score delta {r.max_score_delta}")
        seen: list[str] = []
        for rec in r.mitigations:
            for m in rec.mitigations:
                if m not in seen:
                    seen.append(m)
        for m in seen:
            print(f"   - {m}")
    return 0


def cmd_dot(args, out: _Out) -> int:
    graph = _load(args.file, out)
    sys.stdout.write(export_dot(graph, args.scope))
    return 0


def cmd_catalog(args, out: _Out) -> int:
    catalog = load_catalog(default_catalog_path())
    for r in lookup(catalog, surface=args.surface, tag=args.tag, name=args.name):
        print(f"{r.attack_name} [{r.surface}]")
        if r.authors:
            print(f"  authors: {'; '.join(r.authors)}")
        for m in r.mitigations:
            print(f"  - {m}")
        if r.tags:
            print(f"  tags: {', '.join(sorted(r.tags))}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="suppress informational output")
    common.add_argument("--no-color", action="store_true", default=argparse.SUPPRESS, help="plain diagnostics")

    p = argparse.ArgumentParser(prog="agraph", description="Weighted AND/OR attack-graph analysis", parents=[common])
    sub = p.add_subparsers(dest="cmd", required=True, metavar="command")

    def add(name: str, func, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help, parents=[common])
        sp.set_defaults(func=func)
        return sp

    def table_opts(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--format", choices=["md", "markdown", "csv", "tsv"], default="md")
        sp.add_argument("--goal-display", choices=["exact", "decimal", "paper"], default="exact")

    sp = add("validate", cmd_validate, "check a graph file")
    sp.add_argument("file")

    sp = add("scenarios", cmd_scenarios, "admissible scenario table for one scope")
    sp.add_argument("file")
    sp.add_argument("--scope")
    table_opts(sp)

    sp = add("critical", cmd_critical, "rank steps by frequency across scenario tables")
    sp.add_argument("file")
    sp.add_argument("--scope", action="append")

    sp = add("cuts", cmd_cuts, "minimal cut sets of one scope")
    sp.add_argument("file")
    sp.add_argument("--scope")
    sp.add_argument("--max-size", type=int, default=2)

    sp = add("whatif", cmd_whatif, "before/after effect of one mitigation")
    sp.add_argument("file")
    sp.add_argument("--scope")
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--neutralize", metavar="ID")
    grp.add_argument("--reduce", metavar="ID=W")
    table_opts(sp)

    sp = add("recommend", cmd_recommend, "rank neutralizations and attach catalog mitigations")
    sp.add_argument("file")
    sp.add_argument("--scope", action="append")
    sp.add_argument("-k", type=int, default=5)

    sp = add("dot", cmd_dot, "Graphviz DOT export")
    sp.add_argument("file")
    sp.add_argument("--scope")

    sp = add("catalog", cmd_catalog, "query the attack/mitigation catalog")
    sp.add_argument("--surface", choices=SURFACES)
    sp.add_argument("--name")
    sp.add_argument("--tag")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    quiet = getattr(args, "quiet", False)
    color = not getattr(args, "no_color", False) and "NO_COLOR" not in os.environ and sys.stderr.isatty()
    out = _Out(quiet, color)
    if getattr(args, "max_size", 1) < 1 or getattr(args, "k", 1) < 1:
        parser.error("--max-size and -k must be at least 1")
    try:
        return args.func(args, out)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        out.error(f"agraph: error: {exc}")
        return 2
    except AgfSyntaxError as exc:
        for d in exc.diagnostics:
            out.error(f"{args.file}:{d}")
        return 1
    except AgraphError as exc:
        out.error(f"error: {exc.code}: {exc}")
        return 1
    except OSError as exc:
        out.error(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
