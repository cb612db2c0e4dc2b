"""Scenario enumeration and scoring, chains, criticality and cut sets.

A scenario assigns success (S) or failure (F) to every weighted step of one
scope.  Its score is the exact fraction

    achieved / total = (sum of weights of S steps) / (sum of all scope weights)

and it is admissible when every mandatory step succeeds and at least one
terminal step does.  Soft steps may fail and only lower the score.  Rounding
happens only when a score is displayed.
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from agraph.errors import (
    EmptyChain,
    IncompleteAssignment,
    InvalidChain,
    MissingRoles,
    ScopeTooLarge,
    UnknownNode,
    ZeroTotalWeight,
)
from agraph.graph import AttackGraph, Role

ORACLE_LIMIT = 20
CUT_SET_LIMIT = 24


class Outcome(str, enum.Enum):
    S = "S"
    F = "F"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Column:
    id: str
    label: str
    weight: int


@dataclass(frozen=True)
class Scenario:
    assignment: tuple[tuple[str, Outcome], ...]
    achieved_weight: int
    total_weight: int
    admissible: bool

    @property
    def score(self) -> Fraction:
        return Fraction(self.achieved_weight, self.total_weight)

    @property
    def pattern(self) -> str:
        return "".join(o.value for _, o in self.assignment)

    def outcome(self, node_id: str) -> Outcome:
        for n, o in self.assignment:
            if n == node_id:
                return o
        raise UnknownNode(f"node {node_id!r} is not part of this scenario")

    def as_dict(self) -> dict[str, Outcome]:
        return dict(self.assignment)


@dataclass(frozen=True)
class ScenarioTable:
    scope: str
    columns: tuple[Column, ...]
    rows: tuple[Scenario, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def scores(self) -> list[Fraction]:
        return [r.score for r in self.rows]

    @property
    def patterns(self) -> list[str]:
        return [r.pattern for r in self.rows]

    @property
    def max_score(self) -> Fraction:
        return max(self.scores, default=Fraction(0))


def row_order(s: Scenario) -> tuple:
    """Descending score, then S/F pattern with S ranked before F."""
    return (-s.score, s.pattern.replace("S", "0").replace("F", "1"))


def _columns(graph: AttackGraph, scope: str) -> tuple[Column, ...]:
    cols = []
    for n in graph.weighted_nodes(scope):
        step = graph.node(n)
        cols.append(Column(n, step.label, step.weight))
    return tuple(cols)


def _roles(graph: AttackGraph, scope: str, cols: Sequence[Column]) -> dict[str, Role]:
    missing = [c.id for c in cols if graph.node(c.id).role is None]
    if missing:
        raise MissingRoles(f"scope {scope!r}: no role for {', '.join(missing)}")
    return {c.id: graph.node(c.id).role for c in cols}


def _make(cols: Sequence[Column], outcomes: Sequence[Outcome], admissible: bool) -> Scenario:
    total = sum(c.weight for c in cols)
    if total == 0:
        raise ZeroTotalWeight("scope weights sum to zero; scores are undefined")
    achieved = sum(c.weight for c, o in zip(cols, outcomes) if o is Outcome.S)
    return Scenario(
        assignment=tuple((c.id, o) for c, o in zip(cols, outcomes)),
        achieved_weight=achieved,
        total_weight=total,
        admissible=admissible,
    )


def enumerate_scenarios(graph: AttackGraph, scope: str) -> ScenarioTable:
    """Every admissible scenario of ``scope``, in the documented row order.

    Mandatory steps are fixed to S, each soft step ranges over {S, F} and the
    terminal steps over every non-empty success subset; forced-fail steps
    are pinned to F.  The row count is therefore 2^soft * (2^terminal - 1)
    when nothing is pinned.
    """
    cols = _columns(graph, scope)
    roles = _roles(graph, scope, cols)
    pinned = graph.forced_fail
    if any(roles[c.id] is Role.MANDATORY and c.id in pinned for c in cols):
        return ScenarioTable(scope, cols, ())

    choices: list[tuple[Outcome, ...]] = []
    terminal_idx: list[int] = []
    for i, c in enumerate(cols):
        role = roles[c.id]
        if role is Role.MANDATORY:
            choices.append((Outcome.S,))
        elif c.id in pinned:
            choices.append((Outcome.F,))
        elif role is Role.TERMINAL:
            terminal_idx.append(i)
            choices.append((Outcome.S, Outcome.F))
        else:
            choices.append((Outcome.S, Outcome.F))

    rows = []
    for combo in itertools.product(*choices):
        if not any(combo[i] is Outcome.S for i in terminal_idx):
            continue
        rows.append(_make(cols, combo, True))
    rows.sort(key=row_order)
    return ScenarioTable(scope, cols, tuple(rows))


def score_scenario(graph: AttackGraph, scope: str, assignment: Mapping[str, Outcome | str]) -> Scenario:
    """Score one explicit assignment and decide whether it is admissible.

    Inadmissible scenarios keep their weight ratio in ``score`` but carry
    ``admissible=False``: their probability of success is zero.
    """
    cols = _columns(graph, scope)
    ids = {c.id for c in cols}
    unknown = sorted(set(assignment) - ids)
    if unknown:
        raise UnknownNode(f"not a weighted step of scope {scope!r}: {', '.join(unknown)}")
    missing = [c.id for c in cols if c.id not in assignment]
    if missing:
        raise IncompleteAssignment(f"no outcome for {', '.join(missing)}")
    roles = _roles(graph, scope, cols)
    outcomes = [Outcome(str(assignment[c.id]).upper()) for c in cols]
    mandatory_ok = all(o is Outcome.S for c, o in zip(cols, outcomes) if roles[c.id] is Role.MANDATORY)
    terminal_ok = any(o is Outcome.S for c, o in zip(cols, outcomes) if roles[c.id] is Role.TERMINAL)
    pinned_ok = all(o is Outcome.F for c, o in zip(cols, outcomes) if c.id in graph.forced_fail)
    return _make(cols, outcomes, mandatory_ok and terminal_ok and pinned_ok)


def brute_force_oracle(graph: AttackGraph, scope: str) -> ScenarioTable:
    """Reference enumeration: try all 2^n assignments and keep the admissible ones.

    Independent of :func:`enumerate_scenarios`; used to check it.
    """
    cols = _columns(graph, scope)
    if len(cols) > ORACLE_LIMIT:
        raise ScopeTooLarge(f"{len(cols)} weighted steps; the oracle stops at {ORACLE_LIMIT}")
    roles = _roles(graph, scope, cols)
    rows = []
    for bits in itertools.product((Outcome.S, Outcome.F), repeat=len(cols)):
        by_id = {c.id: b for c, b in zip(cols, bits)}
        if any(by_id[n] is Outcome.S for n in graph.forced_fail if n in by_id):
            continue
        if any(by_id[c.id] is Outcome.F for c in cols if roles[c.id] is Role.MANDATORY):
            continue
        if not any(by_id[c.id] is Outcome.S for c in cols if roles[c.id] is Role.TERMINAL):
            continue
        rows.append(_make(cols, bits, True))
    rows.sort(key=row_order)
    return ScenarioTable(scope, cols, tuple(rows))


# -- display -----------------------------------------------------------------------

GOAL_DISPLAY_MODES = ("exact", "decimal", "paper")
_MODE_ALIASES = {"exact-rational": "exact", "one-decimal": "decimal", "paper-integer": "paper"}


def _half_up(x: Fraction) -> int:
    # round half away from zero
    n = (abs(x) + Fraction(1, 2)).__floor__()
    return n if x >= 0 else -n


def goal_percentage(score: Fraction, mode: str = "exact") -> str:
    """Render a score as a success percentage.

    ``exact`` keeps full precision (``87.5%``, ``200/3%``); ``decimal``
    rounds to one decimal; ``paper`` rounds to an integer, half away from
    zero, so 87.5 shows as 88 where hand-made tables sometimes print 87.
    """
    mode = _MODE_ALIASES.get(mode, mode)
    pct = Fraction(score) * 100
    if mode == "paper":
        return f"{_half_up(pct)}%"
    if mode == "decimal":
        tenths = _half_up(pct * 10)
        sign = "-" if tenths < 0 else ""
        return f"{sign}{abs(tenths) // 10}.{abs(tenths) % 10}%"
    if mode == "exact":
        if pct.denominator == 1:
            return f"{pct.numerator}%"
        d = pct.denominator
        for p in (2, 5):
            while d % p == 0:
                d //= p
        if d == 1:
            places = 0
            while (pct * 10**places).denominator != 1:
                places += 1
            num = (pct * 10**places).numerator
            digits = str(abs(num)).rjust(places + 1, "0")
            sign = "-" if num < 0 else ""
            return f"{sign}{digits[:-places]}.{digits[-places:]}%"
        return f"{pct.numerator}/{pct.denominator}%"
    raise ValueError(f"unknown goal display mode {mode!r}; use one of {', '.join(GOAL_DISPLAY_MODES)}")


# -- chains ------------------------------------------------------------------------


@dataclass(frozen=True)
class Chain:
    nodes: tuple[str, ...]

    def __iter__(self):
        return iter(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)


def enumerate_chains(graph: AttackGraph, scope: str) -> list[Chain]:
    """All source-to-goal paths through the scope (plus its junctions)."""
    visible = graph.scope_subgraph(scope)
    return [Chain(p) for p in graph.paths_to_goal(visible)]


def chain_average_risk(graph: AttackGraph, chain: Chain | Sequence[str]) -> Fraction:
    """Mean weight of the weighted steps along a chain.

    Junctions and the goal are left out of both the sum and the count.
    """
    nodes = tuple(chain)
    if not nodes:
        raise EmptyChain("chain has no nodes")
    goal = graph.goal.id
    for a, b in zip(nodes, nodes[1:]):
        if b not in graph.successors(a):
            raise InvalidChain(f"{a} -> {b} is not an edge")
    if nodes[-1] != goal:
        raise InvalidChain(f"chain must end at the goal {goal!r}")
    weights = [graph.weight(n) for n in nodes if n != goal and not graph.node(n).is_junction]
    if not weights:
        raise EmptyChain("chain has no weighted steps")
    return Fraction(sum(weights), len(weights))


# -- criticality -------------------------------------------------------------------


@dataclass(frozen=True)
class NodeFrequency:
    node: str
    appearances: int
    weighted: int
    scopes: tuple[str, ...]


def node_frequency(tables: Iterable[ScenarioTable]) -> list[NodeFrequency]:
    """Rank steps by how many admissible scenarios they succeed in.

    ``appearances`` counts S cells; ``weighted`` sums the weight carried by
    those cells.  Ranking: appearances, then weighted count (both
    descending), then id.
    """
    count: dict[str, int] = {}
    weighted: dict[str, int] = {}
    scopes: dict[str, set[str]] = {}
    for table in tables:
        for c in table.columns:
            count.setdefault(c.id, 0)
            weighted.setdefault(c.id, 0)
            scopes.setdefault(c.id, set())
        for row in table.rows:
            for c, (_, o) in zip(table.columns, row.assignment):
                if o is Outcome.S:
                    count[c.id] += 1
                    weighted[c.id] += c.weight
                    scopes[c.id].add(table.scope)
    ranked = [NodeFrequency(n, count[n], weighted[n], tuple(sorted(scopes[n]))) for n in count]
    ranked.sort(key=lambda f: (-f.appearances, -f.weighted, f.node))
    return ranked


# -- cut sets ----------------------------------------------------------------------


@dataclass(frozen=True)
class CutSet:
    nodes: frozenset[str]
    minimal: bool = True

    def sorted(self) -> tuple[str, ...]:
        return tuple(sorted(self.nodes))


def minimal_cut_sets(graph: AttackGraph, scope: str, max_size: int = 2) -> list[CutSet]:
    """Minimal step sets whose neutralization leaves no admissible scenario.

    Under role-based admissibility a scenario needs every mandatory step and
    one terminal, so the minimal cuts are each free mandatory step on its
    own and the set of all still-available terminals.  Sorted by size, then
    lexicographically.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    cols = _columns(graph, scope)
    if len(cols) > CUT_SET_LIMIT:
        raise ScopeTooLarge(f"{len(cols)} weighted steps; cut-set search stops at {CUT_SET_LIMIT}")
    roles = _roles(graph, scope, cols)
    if not enumerate_scenarios(graph, scope).rows:
        return [CutSet(frozenset())]
    pinned = graph.forced_fail
    cuts = [frozenset({c.id}) for c in cols if roles[c.id] is Role.MANDATORY]
    terminals = frozenset(c.id for c in cols if roles[c.id] is Role.TERMINAL and c.id not in pinned)
    if terminals and len(terminals) <= max_size:
        cuts.append(terminals)
    cuts.sort(key=lambda s: (len(s), sorted(s)))
    return [CutSet(s) for s in cuts]
