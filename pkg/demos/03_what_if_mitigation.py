"""
What-if analysis of mitigations
===============================

Compare scenario tables before and after blocking a step, or after making
a step harder, then ask for a ranked list of steps worth blocking.
"""

from agraph import MitigationAction, load_fixture, recommend, what_if
from agraph.scenarios import goal_percentage

graph = load_fixture("figure2")


def show(scope, action):
    r = what_if(graph, scope, action)
    print(f"{action} on {scope}: rows {len(r.before)} -> {len(r.after)}, "
          f"best {goal_percentage(r.before.max_score)} -> {goal_percentage(r.after.max_score)}, "
          f"mean per-row change {r.mean_score_delta}")


# Blocking a mandatory step removes every scenario.
show("blueover", MitigationAction.neutralize("get_dev_add"))

# Blocking social engineering leaves only the rows that never needed it.
show("reflection", MitigationAction.neutralize("social_eng"))
show("reflection", MitigationAction.neutralize("physical"))

# Lowering a weight keeps every row.  The total shrinks as well, so rows
# where the step had already failed score slightly higher than before.
show("blueover", MitigationAction.reduce_weight("at_set_avail", 1))

# Ranked recommendations, each with the catalog advice that shares a tag.
for i, rec in enumerate(recommend(graph, k=3), start=1):
    print(f"\n{i}. {rec.action}: {rec.rows_eliminated} rows eliminated")
    advice = sorted({m for record in rec.mitigations for m in record.mitigations})
    for m in advice:
        print(f"   - {m}")
