"""Text renderers: scenario tables (markdown/csv/tsv) and Graphviz DOT."""

from __future__ import annotations

import csv
import io

from agraph.errors import UnsupportedFormat
from agraph.graph import AttackGraph, Role
from agraph.scenarios import Outcome, ScenarioTable, goal_percentage

TABLE_FORMATS = ("markdown", "csv", "tsv")
_FORMAT_ALIASES = {"md": "markdown"}

ROLE_COLORS = {
    Role.MANDATORY: "#f4cccc",
    Role.SOFT: "#fff2cc",
    Role.TERMINAL: "#cfe2f3",
}


def table_cells(table: ScenarioTable, goal_display: str = "exact") -> tuple[list[str], list[list[str]]]:
    """Header and rows as plain strings, shared by every output format."""
    header = [c.label for c in table.columns] + ["Norm", "Goal"]
    rows = []
    for row in table.rows:
        cells = [
            f"S-{col.weight}" if outcome is Outcome.S else "F-0"
            for col, (_, outcome) in zip(table.columns, row.assignment)
        ]
        cells.append(f"{row.achieved_weight}/{row.total_weight}")
        cells.append(goal_percentage(row.score, goal_display))
        rows.append(cells)
    return header, rows


def render_table(table: ScenarioTable, fmt: str = "markdown", goal_display: str = "exact") -> str:
    """Render a scenario table with ``S-<w>`` / ``F-0`` cells, Norm and Goal.

    The Goal column keeps its ``%`` sign in markdown only; csv and tsv carry
    the bare number.
    """
    fmt = _FORMAT_ALIASES.get(fmt, fmt)
    if fmt not in TABLE_FORMATS:
        raise UnsupportedFormat(f"unknown table format {fmt!r}; use one of {', '.join(TABLE_FORMATS)}")
    header, rows = table_cells(table, goal_display)
    if fmt == "markdown":
        def line(cells: list[str]) -> str:
            return "| " + " | ".join(c.replace("|", "\\|") for c in cells) + " |"

        out = [line(header), "| " + " | ".join("---" for _ in header) + " |"]
        out += [line(r) for r in rows]
        return "\n".join(out) + "\n"

    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="," if fmt == "csv" else "\t", lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow(r[:-1] + [r[-1].rstrip("%")])
    return buf.getvalue()


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def export_dot(graph: AttackGraph, scope: str | None = None, *, rankdir: str = "BT") -> str:
    """Graphviz digraph of the attack graph, optionally cut down to one scope.

    Junctions are drawn as points labelled with their gate, other multi-input
    nodes show their gate under the label, and weighted steps read
    ``label (w=N)`` filled by role.  Forced-fail steps are dashed.
    """
    visible = graph.scope_subgraph(scope) if scope is not None else None
    goal = graph.goal

    def shown(n: str) -> bool:
        return visible is None or n in visible

    def gate_suffix(n: str) -> str:
        if len(graph.predecessors(n)) >= 2:
            return f"\n[{graph.gate_of(n).value.upper()}]"
        return ""

    name = "attack_graph" if scope is None else f"attack_graph_{scope}"
    out = [f"digraph {name} {{", f"  rankdir={rankdir};", '  node [fontname="Helvetica"];']
    for step in graph.steps:
        if not shown(step.id):
            continue
        if step.is_junction:
            gate = graph.gate_of(step.id).value.upper()
            out.append(f"  {_dot_id(step.id)} [shape=point, width=0.12, xlabel={_dot_id(gate)}];")
            continue
        label = f"{step.label} (w={step.weight})" + gate_suffix(step.id)
        attrs = [f"label={_dot_id(label)}", "shape=box"]
        styles = ["filled"]
        if step.id in graph.forced_fail:
            styles.append("dashed")
            attrs.append('fontcolor="gray40"')
        attrs.append(f'style="{",".join(styles)}"')
        attrs.append(f'fillcolor="{ROLE_COLORS.get(step.role, "#ffffff")}"')
        out.append(f"  {_dot_id(step.id)} [{', '.join(attrs)}];")
    goal_label = goal.label + gate_suffix(goal.id)
    out.append(f"  {_dot_id(goal.id)} [label={_dot_id(goal_label)}, shape=doubleoctagon];")
    for a, b in graph.edges:
        if shown(a) and shown(b):
            out.append(f"  {_dot_id(a)} -> {_dot_id(b)};")
    out.append("}")
    return "\n".join(out) + "\n"

