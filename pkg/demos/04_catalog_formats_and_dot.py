"""
Catalog queries, graph files and DOT output
===========================================

Query the bundled attack catalog, write a small graph in the ``.agf``
format, read it back and export it for Graphviz.
"""

from agraph import AttackGraph, Goal, Role, StepNode, emit_agf, export_dot, load_catalog, lookup, parse_agf

catalog = load_catalog()
print(f"{len(catalog)} catalog records")
for record in lookup(catalog, tag="device_address"):
    print(f"  {record.attack_name}: {'; '.join(record.mitigations)}")

# A tiny graph built in code: the PIN must be cracked, then either pairing
# eavesdropping or a physical attack finishes the job.
graph = AttackGraph(
    goal=Goal("read_vitals", "Read Vitals"),
    steps=[
        StepNode("crack_pin", "Crack PIN", 2, Role.MANDATORY, frozenset({"authentication"})),
        StepNode("eavesdrop", "Eavesdrop Pairing", 3, Role.TERMINAL, frozenset({"pairing"})),
        StepNode("steal_phone", "Steal Phone", 1, Role.TERMINAL, frozenset({"physical_access"})),
    ],
    edges=[
        ("crack_pin", "eavesdrop"), ("crack_pin", "steal_phone"),
        ("eavesdrop", "read_vitals"), ("steal_phone", "read_vitals"),
    ],
    gates={"read_vitals": "or"},
)

# The text form is canonical, so writing and re-reading gives the same graph.
text = emit_agf(graph)
print(text)
assert parse_agf(text) == graph

# Pipe this into `dot -Tsvg` to draw it.
print(export_dot(graph))
