"""Attack-graph data model, structural validation, role derivation and
neutralization.

An attack graph here is a DAG whose single sink is the attacker's goal.  Step
nodes carry an integer weight (risk units) and a role that drives scenario
admissibility:

* ``mandatory`` - every successful attack needs it
* ``soft``      - failure lowers the score but does not block the attack
* ``terminal``  - finishing step feeding the goal; at least one must succeed
* ``junction``  - weight-0 AND point used to share terminals between attacks

Graphs are immutable.  Transforms (``neutralize``, ``with_roles``,
``with_weight``) return new graphs.
"""

from __future__ import annotations

import enum
import graphlib
import heapq
import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from agraph.errors import CannotNeutralizeJunction, GraphValidationError, UnknownNode, UnknownScope

ID_PATTERN = re.compile(r"[a-z0-9_]+\Z")

# Scope name used when a graph declares no scopes of its own.
IMPLICIT_SCOPE = "all"


class Role(str, enum.Enum):
    MANDATORY = "mandatory"
    SOFT = "soft"
    TERMINAL = "terminal"
    JUNCTION = "junction"

    def __str__(self) -> str:
        return self.value


class GateKind(str, enum.Enum):
    AND = "and"
    OR = "or"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Goal:
    id: str
    label: str = ""
    # Always 0 in a valid graph; kept so a weighted goal can be reported.
    weight: int = 0

    def __post_init__(self) -> None:
        if not self.label:
            object.__setattr__(self, "label", self.id)


@dataclass(frozen=True)
class StepNode:
    id: str
    label: str = ""
    weight: int = 0
    role: Role | None = None
    tags: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.label:
            object.__setattr__(self, "label", self.id)
        if self.role is not None and not isinstance(self.role, Role):
            object.__setattr__(self, "role", Role(self.role))
        if not isinstance(self.tags, frozenset):
            object.__setattr__(self, "tags", frozenset(self.tags))

    @property
    def is_junction(self) -> bool:
        return self.role is Role.JUNCTION


@dataclass(frozen=True, order=True)
class Violation:
    """One broken invariant (or, from :func:`lint`, one warning)."""

    code: str
    message: str
    nodes: tuple[str, ...] = ()
    edge: tuple[str, str] | None = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def _canonical_gates(gates) -> tuple[tuple[str, GateKind], ...]:
    if gates is None:
        return ()
    items = gates.items() if isinstance(gates, Mapping) else gates
    return tuple(sorted((node, GateKind(str(kind).lower())) for node, kind in items))


def _canonical_scopes(scopes) -> tuple[tuple[str, tuple[str, ...]], ...]:
    if scopes is None:
        return ()
    items = scopes.items() if isinstance(scopes, Mapping) else scopes
    return tuple(sorted((name, tuple(ids)) for name, ids in items))


@dataclass(frozen=True)
class AttackGraph:
    """Weighted AND/OR attack graph with a single goal sink.

    Constructor arguments may be any iterables or mappings; they are
    canonicalized (steps sorted by id, edges and gates sorted, scopes keyed by
    name with their column order preserved) so that equality does not depend
    on insertion order.  Construction does not validate; use
    :func:`build_graph` for that.
    """

    goal: Goal
    steps: tuple[StepNode, ...] = ()
    edges: tuple[tuple[str, str], ...] = ()
    gates: tuple[tuple[str, GateKind], ...] = ()
    scopes: tuple[tuple[str, tuple[str, ...]], ...] = ()
    forced_fail: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        if isinstance(self.goal, str):
            set_(self, "goal", Goal(self.goal))
        set_(self, "steps", tuple(sorted(self.steps, key=lambda s: s.id)))
        set_(self, "edges", tuple(sorted({(a, b) for a, b in self.edges})))
        set_(self, "gates", _canonical_gates(self.gates))
        set_(self, "scopes", _canonical_scopes(self.scopes))
        set_(self, "forced_fail", frozenset(self.forced_fail))

    # -- lookups -----------------------------------------------------------

    @cached_property
    def step_map(self) -> dict[str, StepNode]:
        return {s.id: s for s in self.steps}

    @cached_property
    def gate_map(self) -> dict[str, GateKind]:
        return dict(self.gates)

    @cached_property
    def scope_map(self) -> dict[str, tuple[str, ...]]:
        if not self.scopes:
            return {IMPLICIT_SCOPE: tuple(n for n in self.topological_order() if n in self.step_map)}
        return dict(self.scopes)

    @cached_property
    def _preds(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {}
        for a, b in self.edges:
            out.setdefault(b, []).append(a)
        return {k: tuple(sorted(v)) for k, v in out.items()}

    @cached_property
    def _succs(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {}
        for a, b in self.edges:
            out.setdefault(a, []).append(b)
        return {k: tuple(sorted(v)) for k, v in out.items()}

    def predecessors(self, node: str) -> tuple[str, ...]:
        return self._preds.get(node, ())

    def successors(self, node: str) -> tuple[str, ...]:
        return self._succs.get(node, ())

    def node(self, node_id: str) -> StepNode:
        try:
            return self.step_map[node_id]
        except KeyError:
            raise UnknownNode(f"unknown node {node_id!r}") from None

    def gate_of(self, node_id: str) -> GateKind:
        """Declared gate, or AND for nodes with at most one predecessor."""
        return self.gate_map.get(node_id, GateKind.AND)

    def weight(self, node_id: str) -> int:
        return self.node(node_id).weight

    @property
    def scope_names(self) -> tuple[str, ...]:
        return tuple(self.scope_map)

    def topological_order(self) -> tuple[str, ...]:
        """Kahn's algorithm with lexicographic tie-breaking.

        Only meaningful for acyclic graphs; nodes on a cycle are omitted.
        """
        nodes = {self.goal.id, *self.step_map}
        for a, b in self.edges:
            nodes.update((a, b))
        indeg = {n: 0 for n in nodes}
        for _, b in self.edges:
            indeg[b] += 1
        heap = [n for n, d in indeg.items() if d == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            n = heapq.heappop(heap)
            order.append(n)
            for m in self.successors(n):
                indeg[m] -= 1
                if indeg[m] == 0:
                    heapq.heappush(heap, m)
        return tuple(order)

    # -- scopes -------------------------------------------------------------

    def scope(self, name: str) -> tuple[str, ...]:
        try:
            return self.scope_map[name]
        except KeyError:
            raise UnknownScope(
                f"unknown scope {name!r}; known: {', '.join(self.scope_names) or '(none)'}"
            ) from None

    def weighted_nodes(self, scope: str) -> tuple[str, ...]:
        """Scope members that are scored, in column order (junctions dropped)."""
        return tuple(n for n in self.scope(scope) if not self.node(n).is_junction)

    def scope_subgraph(self, scope: str) -> frozenset[str]:
        """Nodes visible to a scope: its members, the goal, and every junction
        whose inputs all lie inside the scope (directly or via such junctions).
        """
        members = set(self.scope(scope))
        members.add(self.goal.id)
        for n in self.topological_order():
            step = self.step_map.get(n)
            if step is None or not step.is_junction or n in members:
                continue
            preds = self.predecessors(n)
            if preds and all(p in members for p in preds):
                members.add(n)
        return frozenset(members)

    def paths_to_goal(self, nodes: Iterable[str] | None = None) -> Iterator[tuple[str, ...]]:
        """Yield every directed path from a source to the goal inside ``nodes``.

        A source is a node with no predecessor inside ``nodes``.  Paths are
        produced in lexicographic DFS order.
        """
        allowed = set(nodes) if nodes is not None else {self.goal.id, *self.step_map}
        goal = self.goal.id
        if goal not in allowed:
            return
        sources = sorted(
            n for n in allowed
            if n != goal and not any(p in allowed for p in self.predecessors(n))
        )
        if goal in allowed and not self.predecessors(goal):
            sources.append(goal)

        def walk(path: list[str]) -> Iterator[tuple[str, ...]]:
            last = path[-1]
            if last == goal:
                yield tuple(path)
                return
            for nxt in self.successors(last):
                if nxt in allowed and nxt not in path:
                    path.append(nxt)
                    yield from walk(path)
                    path.pop()

        for s in sources:
            yield from walk([s])


# -- validation ---------------------------------------------------------------


def _cycle_violation(graph: AttackGraph) -> Violation | None:
    sorter: graphlib.TopologicalSorter = graphlib.TopologicalSorter()
    nodes = sorted({graph.goal.id, *graph.step_map, *(n for e in graph.edges for n in e)})
    for n in nodes:
        sorter.add(n, *graph.predecessors(n))
    try:
        sorter.prepare()
    except graphlib.CycleError as exc:
        # rotate so the reported cycle starts at the least id
        cycle = list(exc.args[1])[:-1]
        start = cycle.index(min(cycle))
        cycle = cycle[start:] + cycle[:start]
        text = "→".join(cycle + [cycle[0]])
        return Violation("CycleDetected", f"cycle {text}", tuple(cycle))
    return None


def validate(graph: AttackGraph) -> list[Violation]:
    """Return every structural violation; an empty list means the graph is valid."""
    out: list[Violation] = []
    goal = graph.goal.id
    known = set(graph.step_map) | {goal}

    for ident in [goal, *(s.id for s in graph.steps)]:
        if not ID_PATTERN.match(ident):
            out.append(Violation("InvalidId", f"id {ident!r} must match [a-z0-9_]+", (ident,)))

    seen: set[str] = {goal}
    for s in graph.steps:
        if s.id in seen:
            out.append(Violation("DuplicateId", f"id {s.id!r} declared more than once", (s.id,)))
        seen.add(s.id)

    if graph.goal.weight != 0:
        out.append(Violation("GoalHasWeight", f"goal {goal!r} carries weight {graph.goal.weight}", (goal,)))

    for s in graph.steps:
        if not isinstance(s.weight, int) or s.weight < 0:
            out.append(Violation("NegativeWeight", f"node {s.id!r} has weight {s.weight}", (s.id,)))
        elif s.is_junction and s.weight != 0:
            out.append(Violation("JunctionHasWeight", f"junction {s.id!r} has weight {s.weight}", (s.id,)))

    for a, b in graph.edges:
        for end in (a, b):
            if end not in known:
                out.append(Violation("UnknownNode", f"edge {a}->{b} references unknown node {end!r}", (end,), (a, b)))
        if a == goal:
            out.append(Violation("GoalHasOutgoingEdge", f"edge {a}->{b} leaves the goal", (a, b), (a, b)))

    for node in graph.gate_map:
        if node not in known:
            out.append(Violation("UnknownNode", f"gate on unknown node {node!r}", (node,)))

    for node in sorted(graph.forced_fail):
        if node not in graph.step_map:
            out.append(Violation("UnknownNode", f"forced-fail on unknown node {node!r}", (node,)))

    cycle = _cycle_violation(graph)
    if cycle is not None:
        out.append(cycle)

    # reverse reachability from the goal
    reach = {goal}
    stack = [goal]
    while stack:
        for p in graph.predecessors(stack.pop()):
            if p not in reach:
                reach.add(p)
                stack.append(p)
    for s in graph.steps:
        if s.id not in reach:
            out.append(Violation("UnreachableNode", f"node {s.id!r} has no path to the goal", (s.id,)))

    for node in sorted(known):
        if len(graph.predecessors(node)) >= 2 and node not in graph.gate_map:
            out.append(Violation("MissingGate", f"node {node!r} has several inputs but no gate", (node,)))

    for s in graph.steps:
        if s.role is Role.TERMINAL and goal not in graph.successors(s.id):
            out.append(Violation(
                "TerminalNotAdjacentToGoal", f"terminal {s.id!r} does not feed the goal directly", (s.id,)))

    for name, ids in graph.scopes:
        if not ID_PATTERN.match(name):
            out.append(Violation("InvalidId", f"scope name {name!r} must match [a-z0-9_]+", (name,)))
        for n in ids:
            if n not in graph.step_map:
                out.append(Violation("ScopeUnknownNode", f"scope {name!r} lists unknown step {n!r}", (n,)))
        if len(set(ids)) != len(ids):
            out.append(Violation("DuplicateId", f"scope {name!r} lists a node twice", (name,)))

    return sorted(out)


def lint(graph: AttackGraph) -> list[Violation]:
    """Weighting and modelling warnings for a structurally valid graph.

    These never block analysis; they flag graphs that are legal but probably
    not what the modeller meant.
    """
    out: list[Violation] = []
    if not graph.steps:
        out.append(Violation("NoSteps", "graph has a goal but no steps"))
    for s in graph.steps:
        if s.weight == 0 and not s.is_junction:
            out.append(Violation("ZeroWeightStep", f"step {s.id!r} has weight 0 and never moves a score", (s.id,)))
        if s.role is None:
            out.append(Violation("MissingRole", f"step {s.id!r} has no declared role", (s.id,)))
    if graph.steps:
        for name in graph.scope_names:
            roles = {graph.node(n).role for n in graph.scope(name)}
            if Role.TERMINAL not in roles:
                out.append(Violation("ScopeWithoutTerminal", f"scope {name!r} has no terminal step; it admits no scenario", (name,)))
    report = derive_roles(graph) if not validate(graph) else None
    if report is not None:
        out.extend(report.issues)
    return sorted(out)


def build_graph(
    goal: Goal | str,
    steps: Iterable[StepNode],
    edges: Iterable[tuple[str, str]],
    gates: Mapping[str, GateKind | str] | None = None,
    scopes: Mapping[str, Iterable[str]] | None = None,
    forced_fail: Iterable[str] = (),
) -> AttackGraph:
    """Construct and validate a graph, raising with every violation at once."""
    graph = AttackGraph(
        goal=goal if isinstance(goal, Goal) else Goal(goal),
        steps=tuple(steps),
        edges=tuple(edges),
        gates=gates,
        scopes=scopes,
        forced_fail=frozenset(forced_fail),
    )
    problems = validate(graph)
    if problems:
        raise GraphValidationError(problems)
    return graph


# -- roles ----------------------------------------------------------------------


@dataclass(frozen=True)
class RoleReport:
    """Derived roles plus anything worth telling the modeller about them.

    ``issues`` holds ``AmbiguousRole`` entries (node left out of ``roles``
    unless it has a declared role) and ``RoleMismatch`` warnings where the
    declared role differs from the derived one.
    """

    roles: dict[str, Role]
    issues: tuple[Violation, ...] = ()


def _and_inputs(graph: AttackGraph, gate_node: str, visible: frozenset[str]) -> set[str]:
    # Junctions are transparent: their own inputs count as inputs of the gate.
    found: set[str] = set()
    stack = [p for p in graph.predecessors(gate_node) if p in visible]
    while stack:
        p = stack.pop()
        step = graph.step_map[p]
        if step.is_junction:
            stack.extend(q for q in graph.predecessors(p) if q in visible)
        else:
            found.add(p)
    return found


def _derive_for_scope(graph: AttackGraph, scope: str) -> dict[str, Role]:
    visible = graph.scope_subgraph(scope)
    goal = graph.goal.id
    weighted = [n for n in visible if n in graph.step_map and not graph.step_map[n].is_junction]
    roles: dict[str, Role] = {}

    goal_inputs = [p for p in graph.predecessors(goal) if p in visible]
    and_goal = len(graph.predecessors(goal)) >= 2 and graph.gate_of(goal) is GateKind.AND
    if not and_goal:
        for p in goal_inputs:
            if not graph.step_map[p].is_junction:
                roles[p] = Role.TERMINAL

    chains = list(graph.paths_to_goal(visible))
    for g in sorted(visible):
        if len(graph.predecessors(g)) < 2 or graph.gate_of(g) is not GateKind.AND:
            continue
        if not chains or not all(g in c for c in chains):
            continue
        for p in _and_inputs(graph, g, visible):
            is_leaf = not any(q in visible for q in graph.predecessors(p))
            if p in roles:
                continue
            if is_leaf or g == goal:
                roles[p] = Role.MANDATORY

    for n in weighted:
        roles.setdefault(n, Role.SOFT)
    return roles


def derive_roles(graph: AttackGraph) -> RoleReport:
    """Heuristically assign roles from gate structure, scope by scope.

    Terminal: direct inputs of an OR-gated (or single-input) goal.  Mandatory:
    leaf inputs of an AND gate that lies on every source-to-goal chain of the
    scope.  Soft: every other weighted step.  Junctions stay junctions.

    The structure cannot tell a soft intermediate from a hard prerequisite in
    general, so declared roles always win elsewhere; this report only
    surfaces where the two disagree.
    """
    per_node: dict[str, set[Role]] = {}
    scoped: set[str] = set()
    for name in graph.scope_names:
        for n, r in _derive_for_scope(graph, name).items():
            per_node.setdefault(n, set()).add(r)
            scoped.add(n)

    leftovers = [s.id for s in graph.steps if s.id not in scoped and not s.is_junction]
    if leftovers and graph.scopes:
        whole = AttackGraph(
            goal=graph.goal, steps=graph.steps, edges=graph.edges, gates=graph.gates,
        )
        derived = _derive_for_scope(whole, IMPLICIT_SCOPE)
        for n in leftovers:
            per_node.setdefault(n, set()).add(derived.get(n, Role.SOFT))

    roles: dict[str, Role] = {}
    issues: list[Violation] = []
    for s in graph.steps:
        if s.is_junction:
            roles[s.id] = Role.JUNCTION
            continue
        found = per_node.get(s.id, {Role.SOFT})
        if len(found) > 1:
            names = "/".join(sorted(r.value for r in found))
            issues.append(Violation("AmbiguousRole", f"node {s.id!r} derives as {names} in different scopes", (s.id,)))
            if s.role is not None:
                roles[s.id] = s.role
            continue
        (derived,) = found
        roles[s.id] = derived
        if s.role is not None and s.role is not derived:
            issues.append(Violation(
                "RoleMismatch", f"node {s.id!r} declared {s.role.value}, structure suggests {derived.value}", (s.id,)))
    return RoleReport(roles=dict(sorted(roles.items())), issues=tuple(sorted(issues)))


def with_roles(graph: AttackGraph, roles: Mapping[str, Role], *, overwrite: bool = False) -> AttackGraph:
    """Fill in (or with ``overwrite``, replace) step roles."""
    steps = []
    for s in graph.steps:
        if s.id in roles and (overwrite or s.role is None):
            s = replace(s, role=Role(roles[s.id]))
        steps.append(s)
    return replace(graph, steps=tuple(steps))


def with_weight(graph: AttackGraph, node_id: str, weight: int) -> AttackGraph:
    graph.node(node_id)
    steps = tuple(replace(s, weight=weight) if s.id == node_id else s for s in graph.steps)
    return replace(graph, steps=steps)


# -- transforms --------------------------------------------------------------------


def neutralize(graph: AttackGraph, node_ids: Iterable[str]) -> AttackGraph:
    """Pin the named steps to failure without touching the graph's shape."""
    ids = frozenset(node_ids)
    for n in sorted(ids):
        if graph.node(n).is_junction:
            raise CannotNeutralizeJunction(f"junction {n!r} carries no attack step to neutralize")
    if ids <= graph.forced_fail:
        return graph
    return replace(graph, forced_fail=graph.forced_fail | ids)


def reaches_goal(graph: AttackGraph, succeeded: Iterable[str]) -> bool:
    """Strict boolean gate evaluation.

    A step is achieved when it succeeded itself (junctions always do, forced
    fails never do) and its gate over its inputs is satisfied; leaves need
    only their own success.  Kept for comparison with role-based
    admissibility, which deliberately tolerates soft-step failures.
    """
    ok = set(succeeded) - graph.forced_fail
    achieved: dict[str, bool] = {}
    for n in graph.topological_order():
        preds = graph.predecessors(n)
        if n == graph.goal.id:
            self_ok = True
        else:
            step = graph.step_map.get(n)
            self_ok = step is not None and (step.is_junction or n in ok) and n not in graph.forced_fail
        if not preds:
            achieved[n] = self_ok and n != graph.goal.id
            continue
        inputs = [achieved.get(p, False) for p in preds]
        gate_ok = any(inputs) if graph.gate_of(n) is GateKind.OR else all(inputs)
        achieved[n] = self_ok and gate_ok
    return achieved.get(graph.goal.id, False)
