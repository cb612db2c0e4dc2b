"""
Which steps matter most
=======================

Rank steps by how often they succeed across both attacks, list the
minimal cut sets of each attack and the average risk along every chain.
"""

from agraph import (
    chain_average_risk,
    enumerate_chains,
    enumerate_scenarios,
    load_fixture,
    minimal_cut_sets,
    node_frequency,
)

graph = load_fixture("figure2")
tables = [enumerate_scenarios(graph, s) for s in graph.scope_names]

# The device address step is required by both attacks, so it succeeds in
# every admissible row of either table.
print("node                appearances  weighted")
for f in node_frequency(tables):
    print(f"{f.node:<20}{f.appearances:>11}{f.weighted:>10}")

# Blocking any one cut set leaves the attack with no admissible scenario.
for scope in graph.scope_names:
    cuts = ["{" + ", ".join(c.sorted()) + "}" for c in minimal_cut_sets(graph, scope)]
    print(f"\n{scope} cut sets: {' '.join(cuts)}")

# Average risk of a chain: mean weight of its weighted steps.  Junctions
# and the goal are left out.
for scope in graph.scope_names:
    print(f"\n{scope} chains")
    for chain in enumerate_chains(graph, scope):
        print(f"  {' -> '.join(chain.nodes)}: {chain_average_risk(graph, chain)}")
