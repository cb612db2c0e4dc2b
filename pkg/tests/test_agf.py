import warnings

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from agraph.agf import AgfWarning, emit_agf, parse_agf, read_document
from agraph.errors import AgfSyntaxError
from agraph.fixtures import FIXTURES, fixture_path
from agraph.graph import AttackGraph, Role, StepNode

from strategies import attack_graphs


def diagnostics(text):
    with pytest.raises(AgfSyntaxError) as info:
        parse_agf(text)
    return info.value.diagnostics


def non_comment_lines(text):
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_round_trip(name):
    text = fixture_path(name).read_text(encoding="utf-8")
    graph = parse_agf(text)
    emitted = emit_agf(graph)
    assert parse_agf(emitted) == graph
    assert emit_agf(parse_agf(emitted)) == emitted


def test_blueover_weights(blueover):
    assert [blueover.weight(n) for n in blueover.weighted_nodes("blueover")] == [1, 2, 2, 1, 2]


def test_single_node_emits_three_statements():
    g = AttackGraph(goal="goal", steps=[StepNode("x", "X", 1, Role.TERMINAL)], edges=[("x", "goal")])
    text = emit_agf(g)
    assert len(non_comment_lines(text)) == 3
    assert text.startswith("#!agf 1\n")


def test_emit_is_byte_stable(figure2):
    assert emit_agf(figure2) == emit_agf(figure2)
    assert emit_agf(figure2).encode() == emit_agf(parse_agf(emit_agf(figure2))).encode()


def test_goal_only_file_warns():
    with pytest.warns(AgfWarning, match="NoSteps"):
        g = parse_agf('goal g "Goal"\n')
    assert g.steps == ()


def test_negative_weight_located():
    (d,) = diagnostics('goal g "G"\nnode x weight=-1\nedge x -> g\n')
    assert (d.line, d.code) == (2, "NegativeWeight")
    assert d.column == len("node x weight=") + 1


def test_labels_and_weights_are_optional():
    g = parse_agf("goal g\nnode x\nedge x -> g\n")
    assert g.node("x").label == "x" and g.node("x").weight == 0


def test_label_escapes():
    g = parse_agf('goal g "say \\"hi\\" \\\\ # not a comment"\nnode x "X" weight=1\nedge x -> g  # trailing\n')
    assert g.goal.label == 'say "hi" \\ # not a comment'


@pytest.mark.parametrize(
    "text, line, column, code",
    [
        ('goal g "G"\nedge x g\n', 2, 8, "SyntaxError"),
        ('goal g "G"\nvertex x\n', 2, 1, "SyntaxError"),
        ('goal g "G"\ngoal h "H"\n', 2, 1, "DuplicateGoal"),
        ('goal g "G"\nnode x weight=two\n', 2, 15, "InvalidWeight"),
        ('goal g "G"\nnode x role=boss\n', 2, 13, "InvalidRole"),
        ('goal g "G"\nnode x weight=1 weight=2\n', 2, 17, "DuplicateAttribute"),
        ('goal g "G"\nnode Bad\n', 2, 6, "InvalidId"),
        ('goal g "unterminated\n', 1, 8, "SyntaxError"),
        ('#!agf 9\ngoal g\n', 1, 1, "UnsupportedVersion"),
        ('node x\n', 1, 1, "MissingGoal"),
        ('goal g\nnode x weight=1\nedge x -> g\nedge g -> x\n', 4, 1, "CycleDetected"),
        ('goal g\nnode x weight=1\nedge x -> g\nedge x -> y\n', 4, 1, "UnknownNode"),
    ],
)
def test_diagnostics_are_located(text, line, column, code):
    found = diagnostics(text)
    assert any((d.line, d.column, d.code) == (line, column, code) for d in found), found


def test_all_problems_reported_together():
    found = diagnostics('goal g\nnode x weight=-1\nnode y role=boss\nwibble\n')
    assert [d.line for d in found] == [2, 3, 4]


def test_diagnostic_text():
    (d,) = diagnostics('goal g "G"\nedge x g\n')
    assert str(d).startswith("2:8: SyntaxError:")
    assert "'->'" in str(d)


def test_comments_survive_read_but_not_graph():
    doc = read_document("#!agf 1\n# hello\ngoal g\n")
    assert doc.comments == ["hello"]
    assert doc.version == 1


def test_fail_statement_round_trips(blueover):
    from agraph.graph import neutralize

    g = neutralize(blueover, {"physical", "at_set_avail"})
    text = emit_agf(g)
    assert "fail at_set_avail,physical" in text
    assert parse_agf(text) == g


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(attack_graphs(labels=True, forced_fail=True), st.data())
def test_round_trip_fuzzed(graph, data):
    drop = data.draw(st.sets(st.sampled_from([s.id for s in graph.steps])))
    if drop:
        steps = [StepNode(s.id, s.label, s.weight, None if s.id in drop else s.role, s.tags) for s in graph.steps]
        graph = AttackGraph(graph.goal, steps, graph.edges, graph.gates, graph.scopes, graph.forced_fail)
    text = emit_agf(graph)
    assert parse_agf(text) == graph
    assert emit_agf(parse_agf(text)) == text


def mutate(text: str, data) -> str:
    ops = data.draw(st.lists(st.integers(0, 3), min_size=1, max_size=4))
    for op in ops:
        if not text:
            break
        i = data.draw(st.integers(0, len(text) - 1))
        if op == 0:
            text = text[:i] + text[i + 1:]
        elif op == 1:
            text = text[:i] + data.draw(st.sampled_from(list('"=,->#\\ \nabcX-1'))) + text[i:]
        elif op == 2:
            lines = text.splitlines()
            j = data.draw(st.integers(0, len(lines) - 1))
            lines.insert(j, lines[data.draw(st.integers(0, len(lines) - 1))])
            text = "\n".join(lines)
        else:
            lines = text.splitlines()
            del lines[data.draw(st.integers(0, len(lines) - 1))]
            text = "\n".join(lines)
    return text


def check_never_crashes(text: str) -> None:
    n_lines = max(len(text.splitlines()), 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            parse_agf(text)
        except AgfSyntaxError as exc:
            assert exc.diagnostics
            for d in exc.diagnostics:
                assert 1 <= d.line <= n_lines
                assert d.column >= 1
                assert d.code and d.message


@settings(max_examples=300, deadline=None)
@given(attack_graphs(labels=True), st.data())
def test_mutated_documents_never_crash(graph, data):
    check_never_crashes(mutate(emit_agf(graph), data))


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet=st.characters(codec="utf-8"), max_size=200))
def test_arbitrary_text_never_crashes(text):
    check_never_crashes(text)
