import csv
import io
import re

import pytest
from hypothesis import given, settings

from agraph.errors import UnsupportedFormat
from agraph.graph import AttackGraph, Goal, neutralize
from agraph.render import export_dot, render_table, table_cells
from agraph.scenarios import enumerate_scenarios

from strategies import attack_graphs

NODE = re.compile(r'^  "((?:[^"\\]|\\.)*)" \[(.*)\];$')
EDGE = re.compile(r'^  "((?:[^"\\]|\\.)*)" -> "((?:[^"\\]|\\.)*)";$')


def parse_dot(text):
    nodes, edges = {}, set()
    for line in text.splitlines():
        if m := EDGE.match(line):
            edges.add((m.group(1), m.group(2)))
        elif m := NODE.match(line):
            nodes[m.group(1)] = m.group(2)
    return nodes, edges


def test_dot_structure(figure2):
    text = export_dot(figure2)
    assert text.startswith("digraph attack_graph {")
    nodes, edges = parse_dot(text)
    assert set(nodes) == {s.id for s in figure2.steps} | {figure2.goal.id}
    assert edges == set(figure2.edges)
    assert "shape=point" in nodes["reflection_and"] and 'xlabel="AND"' in nodes["reflection_and"]
    assert "doubleoctagon" in nodes["data_acquisition"]
    assert "Get Dev Address (w=2)" in nodes["get_dev_add"]
    assert "AT Set Available (w=2)\\n[AND]" in nodes["at_set_avail"]


def test_dot_roles_colored(figure2):
    nodes, _ = parse_dot(export_dot(figure2))
    fills = {n: re.search(r'fillcolor="([^"]+)"', a).group(1) for n, a in nodes.items() if "fillcolor" in a}
    assert fills["get_dev_add"] == fills["access_at_comm"] == fills["no_encryption"]
    assert fills["physical"] == fills["social_eng"] != fills["get_dev_add"]
    assert fills["at_set_avail"] not in (fills["physical"], fills["get_dev_add"])


def test_dot_scope_filter(figure2):
    nodes, edges = parse_dot(export_dot(figure2, "reflection"))
    expected = set(figure2.scope_subgraph("reflection"))
    assert set(nodes) == expected
    assert "at_set_avail" not in nodes and "reflection_and" in nodes
    assert all(a in expected and b in expected for a, b in edges)


def test_dot_forced_fail_dashed(blueover):
    nodes, _ = parse_dot(export_dot(neutralize(blueover, {"physical"})))
    assert "dashed" in nodes["physical"]
    assert "dashed" not in nodes["social_eng"]


def test_dot_goal_only():
    nodes, edges = parse_dot(export_dot(AttackGraph(goal="g", steps=[], edges=[])))
    assert set(nodes) == {"g"} and edges == set()


def test_dot_quotes_labels():
    g = AttackGraph(goal=Goal("g", 'say "hi"'), steps=[], edges=[])
    assert 'label="say \\"hi\\""' in export_dot(g)


def test_dot_deterministic(figure2):
    assert export_dot(figure2) == export_dot(figure2)


def test_markdown_table(blueover):
    text = render_table(enumerate_scenarios(blueover, "blueover"))
    lines = text.splitlines()
    assert lines[0] == "| Access AT Comm | Get Dev Address | AT Set Available | Physical | Social Engineering | Norm | Goal |"
    assert lines[2] == "| S-1 | S-2 | S-2 | S-1 | S-2 | 8/8 | 100% |"
    assert len(lines) == 8


def test_integer_display(blueover):
    text = render_table(enumerate_scenarios(blueover, "blueover"), "md", "paper")
    goals = [ln.split("|")[-2].strip() for ln in text.splitlines()[2:]]
    assert goals == ["100%", "88%", "75%", "75%", "63%", "50%"]


def test_csv_table(reflection):
    text = render_table(enumerate_scenarios(reflection, "reflection"), "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert len(rows) == 4
    assert rows[1] == ["S-3", "S-2", "S-1", "S-2", "8/8", "100"]
    assert rows[2][-1] == "87.5"


def test_tsv_table(reflection):
    text = render_table(enumerate_scenarios(reflection, "reflection"), "tsv")
    assert text.splitlines()[1].split("\t") == ["S-3", "S-2", "S-1", "S-2", "8/8", "100"]


def test_empty_table(blueover):
    table = enumerate_scenarios(neutralize(blueover, {"get_dev_add"}), "blueover")
    assert len(render_table(table, "csv").splitlines()) == 1
    assert len(render_table(table).splitlines()) == 2


def test_unsupported_format(blueover):
    with pytest.raises(UnsupportedFormat):
        render_table(enumerate_scenarios(blueover, "blueover"), "html")


@settings(max_examples=100, deadline=None)
@given(attack_graphs(labels=True))
def test_formats_agree(graph):
    table = enumerate_scenarios(graph, "main")
    header, body = table_cells(table)
    csv_rows = list(csv.reader(io.StringIO(render_table(table, "csv"))))
    assert len({len(r) for r in csv_rows}) == 1
    assert csv_rows[0] == header
    assert [r[:-1] for r in csv_rows[1:]] == [r[:-1] for r in body]
    assert [r[-1] + "%" for r in csv_rows[1:]] == [r[-1] for r in body]
    md = render_table(table, "markdown").splitlines()
    assert len(md) == len(body) + 2
    for line, cells in zip(md[2:], body):
        assert line == "| " + " | ".join(c.replace("|", "\\|") for c in cells) + " |"
