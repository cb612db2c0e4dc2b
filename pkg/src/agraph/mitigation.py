"""What-if evaluation of mitigations and ranked recommendations.

Two kinds of action exist: ``neutralize`` pins a step to failure (the
mitigation blocks it outright, e.g. link encryption) and ``reduce_weight``
lowers its weight (the step becomes harder, e.g. longer PINs).
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from agraph.catalog import Catalog, MitigationRecord, load_catalog, matching_records
from agraph.errors import InvalidWeight, UnknownNode
from agraph.graph import AttackGraph, neutralize, with_weight
from agraph.scenarios import Outcome, ScenarioTable, enumerate_scenarios, node_frequency


class ActionKind(str, enum.Enum):
    NEUTRALIZE = "neutralize"
    REDUCE_WEIGHT = "reduce_weight"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MitigationAction:
    kind: ActionKind
    target: str
    new_weight: int | None = None
    source: str | None = None

    @classmethod
    def neutralize(cls, target: str, source: str | None = None) -> "MitigationAction":
        return cls(ActionKind.NEUTRALIZE, target, None, source)

    @classmethod
    def reduce_weight(cls, target: str, new_weight: int, source: str | None = None) -> "MitigationAction":
        return cls(ActionKind.REDUCE_WEIGHT, target, new_weight, source)

    def __str__(self) -> str:
        if self.kind is ActionKind.NEUTRALIZE:
            return f"neutralize {self.target}"
        return f"reduce {self.target} to weight {self.new_weight}"


def apply_action(graph: AttackGraph, action: MitigationAction) -> AttackGraph:
    if action.kind is ActionKind.NEUTRALIZE:
        return neutralize(graph, [action.target])
    current = graph.weight(action.target)
    w = action.new_weight
    if w is None or not isinstance(w, int) or w < 0 or w >= current:
        raise InvalidWeight(
            f"reduce_weight on {action.target!r} needs an integer in [0, {current}), got {w!r}")
    return with_weight(graph, action.target, w)


@dataclass(frozen=True)
class WhatIfResult:
    """Before/after tables for one action on one scope.

    Rows align by assignment: each before-row is compared with the same
    assignment after the action (target forced to F for ``neutralize``),
    scoring 0 if that scenario is no longer admissible.
    ``mean_score_delta`` averages those per-row changes; ``max_score_delta``
    compares the best rows of the two tables (an empty table's best is 0).
    """

    action: MitigationAction
    before: ScenarioTable
    after: ScenarioTable
    max_score_delta: Fraction
    mean_score_delta: Fraction
    rows_eliminated: int


def _aligned_deltas(before: ScenarioTable, after: ScenarioTable, action: MitigationAction) -> list[Fraction]:
    after_by_key = {r.assignment: r.score for r in after.rows}
    deltas = []
    for row in before.rows:
        key = row.assignment
        if action.kind is ActionKind.NEUTRALIZE:
            key = tuple((n, Outcome.F if n == action.target else o) for n, o in key)
        deltas.append(after_by_key.get(key, Fraction(0)) - row.score)
    return deltas


def what_if(graph: AttackGraph, scope: str, action: MitigationAction) -> WhatIfResult:
    if action.target not in graph.weighted_nodes(scope):
        raise UnknownNode(f"{action.target!r} is not a weighted step of scope {scope!r}")
    before = enumerate_scenarios(graph, scope)
    after = enumerate_scenarios(apply_action(graph, action), scope)
    deltas = _aligned_deltas(before, after, action)
    mean = sum(deltas, Fraction(0)) / len(deltas) if deltas else Fraction(0)
    return WhatIfResult(
        action=action,
        before=before,
        after=after,
        max_score_delta=after.max_score - before.max_score,
        mean_score_delta=mean,
        rows_eliminated=len(before.rows) - len(after.rows),
    )


@dataclass(frozen=True)
class Recommendation:
    """Neutralizing one step, evaluated over every scope that contains it."""

    action: MitigationAction
    results: dict[str, WhatIfResult]
    rows_eliminated: int
    max_score_delta: Fraction
    frequency_rank: int
    mitigations: tuple[MitigationRecord, ...] = ()

    @property
    def target(self) -> str:
        return self.action.target


def recommend(
    graph: AttackGraph,
    scopes: Iterable[str] | None = None,
    catalog: Catalog | None = None,
    k: int = 5,
) -> list[Recommendation]:
    """Rank single-step neutralizations by how much attack surface they remove.

    Ranking keys, in order: total rows eliminated across the scopes (more
    first), summed ``max_score_delta`` (more negative first), then the
    step's position in :func:`node_frequency` over the unmitigated tables of
    every scope in the graph, so a step shared between attacks wins ties even
    when only one attack is being mitigated.
    Catalog records sharing a tag with the step are attached.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    names = list(scopes) if scopes is not None else list(graph.scope_names)
    if catalog is None:
        catalog = load_catalog()
    if not catalog.records:
        warnings.warn("EmptyCatalog: recommendations carry no catalog mitigations", UserWarning, stacklevel=2)

    tables = (enumerate_scenarios(graph, s) for s in graph.scope_names)
    rank = {f.node: i for i, f in enumerate(node_frequency(tables))}
    targets = sorted({n for s in names for n in graph.weighted_nodes(s)})

    recs = []
    for node in targets:
        records = matching_records(catalog, graph.node(node).tags)
        source = records[0].attack_name if records else None
        action = MitigationAction.neutralize(node, source)
        results = {s: what_if(graph, s, action) for s in names if node in graph.weighted_nodes(s)}
        recs.append(Recommendation(
            action=action,
            results=results,
            rows_eliminated=sum(r.rows_eliminated for r in results.values()),
            max_score_delta=sum((r.max_score_delta for r in results.values()), Fraction(0)),
            frequency_rank=rank.get(node, len(rank)),
            mitigations=tuple(records),
        ))
    recs.sort(key=lambda r: (-r.rows_eliminated, r.max_score_delta, r.frequency_rank, r.target))
    return recs[:k]
