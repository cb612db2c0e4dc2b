"""
Scenario tables for the two Bluetooth attacks
=============================================

Load the bundled combined graph and print the admissible scenarios of each
attack, with exact scores and with integer percentages.
"""

from agraph import enumerate_scenarios, load_fixture, render_table

graph = load_fixture("figure2")
print("scopes:", ", ".join(graph.scope_names))

# Each row assigns S or F to every weighted step of the scope.  Mandatory
# steps are always S, so rows where they fail never appear.
for scope in graph.scope_names:
    table = enumerate_scenarios(graph, scope)
    print(f"\n{scope}: {len(table)} rows")
    print(render_table(table, "markdown", goal_display="paper"))

# Scores stay exact fractions; rounding happens only for display.
blueover = enumerate_scenarios(graph, "blueover")
print("exact scores:", [str(s) for s in blueover.scores])

# The same table as CSV, ready for a spreadsheet.
print(render_table(blueover, "csv", goal_display="decimal"))
