"""Weighted AND/OR attack graphs: scenario tables, criticality, cut sets and
what-if mitigation analysis."""

from agraph.agf import emit_agf, parse_agf
from agraph.catalog import Catalog, MitigationRecord, load_catalog, lookup
from agraph.fixtures import load_fixture
from agraph.graph import (
    AttackGraph,
    GateKind,
    Goal,
    Role,
    StepNode,
    Violation,
    build_graph,
    derive_roles,
    lint,
    neutralize,
    validate,
)
from agraph.mitigation import MitigationAction, WhatIfResult, recommend, what_if
from agraph.render import export_dot, render_table
from agraph.scenarios import (
    Chain,
    CutSet,
    Outcome,
    Scenario,
    ScenarioTable,
    brute_force_oracle,
    chain_average_risk,
    enumerate_chains,
    enumerate_scenarios,
    goal_percentage,
    minimal_cut_sets,
    node_frequency,
    score_scenario,
)

__version__ = "0.1.0"
